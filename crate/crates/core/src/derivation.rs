//! Derivations of a polynomial ring given by the images of its variables.

use std::collections::HashMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::poly::{exact_divide, gcd_many, PolyError, Polynomial, Rational, VarSet};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DerivationError {
    #[error("the derivation is zero")]
    ZeroDerivation,
    #[error("expected {expected} images, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("supplied inverse does not invert the automorphism")]
    InverseMismatch,
    #[error("iterates of `{var}` did not vanish within {bound} steps")]
    NotNilpotentWithin { var: String, bound: usize },
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Bounds for the local-nilpotency semi-decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LndBounds {
    /// Maximum number of applications per variable.
    pub iterations: usize,
    /// Iterates of total degree above `4 * degree_cap` abort the check.
    pub degree_cap: u32,
}

impl Default for LndBounds {
    fn default() -> Self {
        LndBounds {
            iterations: 200,
            degree_cap: 60,
        }
    }
}

/// A derivation `X` stored as `(X(x_1), ..., X(x_n))`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Derivation {
    vars: VarSet,
    images: Vec<Polynomial>,
}

impl fmt::Debug for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .vars
            .names()
            .iter()
            .zip(&self.images)
            .map(|(v, p)| format!("{v} -> {p}"))
            .collect();
        write!(f, "Derivation({})", parts.join(", "))
    }
}

impl Derivation {
    pub fn new(vars: &VarSet, images: Vec<Polynomial>) -> Result<Self, DerivationError> {
        if images.len() != vars.len() {
            return Err(DerivationError::Arity {
                expected: vars.len(),
                got: images.len(),
            });
        }
        let images = images
            .iter()
            .map(|p| p.embed(vars))
            .collect::<Result<Vec<_>, _>>()?;
        if images.iter().all(Polynomial::is_zero) {
            return Err(DerivationError::ZeroDerivation);
        }
        Ok(Derivation {
            vars: vars.clone(),
            images,
        })
    }

    /// The partial derivative with respect to `name`.
    pub fn partial(vars: &VarSet, name: &str) -> Result<Self, DerivationError> {
        let i = vars
            .index_of(name)
            .ok_or_else(|| PolyError::UnknownVariable(name.into()))?;
        let images = (0..vars.len())
            .map(|j| Polynomial::from_int(vars, (i == j) as i64))
            .collect();
        Self::new(vars, images)
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn images(&self) -> &[Polynomial] {
        &self.images
    }

    pub fn image(&self, i: usize) -> &Polynomial {
        &self.images[i]
    }

    /// `X(h) = sum X(x_i) dh/dx_i`.
    pub fn apply(&self, h: &Polynomial) -> Polynomial {
        let h = h.embed(&self.vars).expect("polynomial over the derivation's ring");
        let mut acc = Polynomial::zero(&self.vars);
        for (i, img) in self.images.iter().enumerate() {
            if img.is_zero() || !h.involves(i) {
                continue;
            }
            acc = &acc + &(img * &h.derivative(i));
        }
        acc
    }

    /// `X^k(h)`.
    pub fn iterate(&self, h: &Polynomial, k: usize) -> Polynomial {
        let mut cur = h.embed(&self.vars).expect("polynomial over the derivation's ring");
        for _ in 0..k {
            if cur.is_zero() {
                break;
            }
            cur = self.apply(&cur);
        }
        cur
    }

    /// `c * X`.
    pub fn scale(&self, c: &Polynomial) -> Derivation {
        let c = c.embed(&self.vars).expect("multiplier over the derivation's ring");
        Derivation {
            vars: self.vars.clone(),
            images: self.images.iter().map(|p| &c * p).collect(),
        }
    }

    /// `X / c`, when `c` divides every image.
    pub fn divide(&self, c: &Polynomial) -> Result<Derivation, DerivationError> {
        let images = self
            .images
            .iter()
            .map(|p| exact_divide(p, c))
            .collect::<Result<Vec<_>, _>>()?;
        Derivation::new(&self.vars, images)
    }

    /// Images as grammar strings.
    pub fn image_strings(&self) -> Vec<String> {
        self.images.iter().map(ToString::to_string).collect()
    }
}

/// Kernel generators `f, g` of a derivation of a three-variable ring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelPair {
    pub f: Polynomial,
    pub g: Polynomial,
}

impl KernelPair {
    /// Tag bindings `(F -> f, G -> g)` for subalgebra computations.
    pub fn tags<'a>(&self, f_name: &'a str, g_name: &'a str) -> [(&'a str, Polynomial); 2] {
        [(f_name, self.f.clone()), (g_name, self.g.clone())]
    }
}

fn det3(m: [[&Polynomial; 3]; 3]) -> Polynomial {
    let minor = |a: &Polynomial, b: &Polynomial, c: &Polynomial, d: &Polynomial| &(a * d) - &(b * c);
    let t0 = m[0][0] * &minor(m[1][1], m[1][2], m[2][1], m[2][2]);
    let t1 = m[0][1] * &minor(m[1][0], m[1][2], m[2][0], m[2][2]);
    let t2 = m[0][2] * &minor(m[1][0], m[1][1], m[2][0], m[2][1]);
    &(&t0 - &t1) + &t2
}

/// `X(h) = det d(f, g, h)/d(x, y, z)` on a three-variable ring.
pub fn jacobian_derivation(
    vars: &VarSet,
    f: &Polynomial,
    g: &Polynomial,
) -> Result<Derivation, DerivationError> {
    if vars.len() != 3 {
        return Err(DerivationError::Arity {
            expected: 3,
            got: vars.len(),
        });
    }
    let f = f.embed(vars)?;
    let g = g.embed(vars)?;
    let df: Vec<Polynomial> = (0..3).map(|i| f.derivative(i)).collect();
    let dg: Vec<Polynomial> = (0..3).map(|i| g.derivative(i)).collect();
    let zero = Polynomial::zero(vars);
    let one = Polynomial::one(vars);
    let images = (0..3)
        .map(|k| {
            let e: Vec<&Polynomial> = (0..3).map(|j| if j == k { &one } else { &zero }).collect();
            det3([
                [&df[0], &df[1], &df[2]],
                [&dg[0], &dg[1], &dg[2]],
                [e[0], e[1], e[2]],
            ])
        })
        .collect();
    Derivation::new(vars, images)
}

/// `D_U = U_G d/dF - U_F d/dG` on a two-variable ring, so that
/// `D_U(P) = -Jac(U, P)`.
pub fn jacobian_derivation_2(vars: &VarSet, u: &Polynomial) -> Result<Derivation, DerivationError> {
    if vars.len() != 2 {
        return Err(DerivationError::Arity {
            expected: 2,
            got: vars.len(),
        });
    }
    let u = u.embed(vars)?;
    Derivation::new(vars, vec![u.derivative(1), -u.derivative(0)])
}

/// `det d(a, b)/d(F, G)`.
pub fn jacobian_2(a: &Polynomial, b: &Polynomial) -> Polynomial {
    &(&a.derivative(0) * &b.derivative(1)) - &(&a.derivative(1) * &b.derivative(0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NilpotencyStatus {
    LocallyNilpotent,
    ExceededBound,
}

/// Why a nilpotency check stopped without success.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StopReason {
    IterationBound { var: String },
    DegreeCap { var: String, degree: u32 },
    /// `X^(j+period)(var)` is a scalar multiple of `X^j(var)`, which cannot
    /// happen for a locally nilpotent derivation.
    Cycle { var: String, start: usize, period: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NilpotencyVerdict {
    pub status: NilpotencyStatus,
    /// Minimal `k` with `X^k(x_i) = 0`, per variable (when nilpotent).
    pub iteration_counts: Vec<usize>,
    pub bound_used: LndBounds,
    pub stop: Option<StopReason>,
}

impl NilpotencyVerdict {
    pub fn is_nilpotent(&self) -> bool {
        self.status == NilpotencyStatus::LocallyNilpotent
    }

    /// A sound refutation was found along the way.
    pub fn refuted(&self) -> bool {
        matches!(self.stop, Some(StopReason::Cycle { .. }))
    }
}

enum Chain {
    Vanishes(Vec<Polynomial>),
    Stopped(StopReason),
}

/// Iterates of `v` up to (excluding) the first zero one.
fn chain(x: &Derivation, v: &Polynomial, name: &str, bounds: LndBounds) -> Chain {
    let mut seen: HashMap<Polynomial, usize> = HashMap::new();
    let mut out = vec![v.clone()];
    let cap = bounds.degree_cap.saturating_mul(4);
    for k in 0..bounds.iterations {
        let cur = &out[k];
        let deg = cur.total_degree().unwrap_or(0);
        if deg > cap {
            return Chain::Stopped(StopReason::DegreeCap {
                var: name.into(),
                degree: deg,
            });
        }
        let key = cur.normalized();
        if let Some(&j) = seen.get(&key) {
            return Chain::Stopped(StopReason::Cycle {
                var: name.into(),
                start: j,
                period: k - j,
            });
        }
        seen.insert(key, k);
        let next = x.apply(cur);
        if next.is_zero() {
            return Chain::Vanishes(out);
        }
        out.push(next);
    }
    Chain::Stopped(StopReason::IterationBound { var: name.into() })
}

/// Bounded semi-decision: accepts when the iterates of every variable vanish.
pub fn is_locally_nilpotent(x: &Derivation, bounds: LndBounds) -> NilpotencyVerdict {
    let mut counts = Vec::new();
    for i in 0..x.vars.len() {
        let v = Polynomial::var_at(&x.vars, i);
        match chain(x, &v, x.vars.name(i), bounds) {
            Chain::Vanishes(c) => counts.push(c.len()),
            Chain::Stopped(reason) => {
                return NilpotencyVerdict {
                    status: NilpotencyStatus::ExceededBound,
                    iteration_counts: counts,
                    bound_used: bounds,
                    stop: Some(reason),
                }
            }
        }
    }
    NilpotencyVerdict {
        status: NilpotencyStatus::LocallyNilpotent,
        iteration_counts: counts,
        bound_used: bounds,
        stop: None,
    }
}

/// `X = c0 * Y` with `c0` the normalized gcd of the images.
pub fn irreducible_decomposition(
    x: &Derivation,
) -> Result<(Polynomial, Derivation), DerivationError> {
    let c0 = gcd_many(x.images.iter()).ok_or(DerivationError::ZeroDerivation)?;
    let c0 = if c0.is_constant() {
        Polynomial::one(&x.vars)
    } else {
        c0
    };
    if !x.apply(&c0).is_zero() {
        return Err(DerivationError::Inconsistent(
            "the gcd of the images is not a constant of the derivation".into(),
        ));
    }
    Ok((c0.clone(), x.divide(&c0)?))
}

/// The local slice `X^(k-1)(v)` read off a variable chain of length
/// `k + 1 >= 2`, taking the one whose image has the lowest degree (ties go
/// to the lower slice degree, then to the later variable).
pub fn local_slice(x: &Derivation, bounds: LndBounds) -> Result<Polynomial, DerivationError> {
    let mut best: Option<((u32, u32), Polynomial)> = None;
    for i in (0..x.vars.len()).rev() {
        let v = Polynomial::var_at(&x.vars, i);
        match chain(x, &v, x.vars.name(i), bounds) {
            Chain::Vanishes(c) if c.len() >= 2 => {
                let s = &c[c.len() - 2];
                let key = (
                    c[c.len() - 1].total_degree().unwrap_or(0),
                    s.total_degree().unwrap_or(0),
                );
                if best.as_ref().map_or(true, |(k, _)| key < *k) {
                    best = Some((key, s.clone()));
                }
            }
            Chain::Vanishes(_) => continue,
            Chain::Stopped(_) => {
                return Err(DerivationError::NotNilpotentWithin {
                    var: x.vars.name(i).into(),
                    bound: bounds.iterations,
                })
            }
        }
    }
    best.map(|(_, s)| s).ok_or(DerivationError::ZeroDerivation)
}

/// All local slices read off the variable chains.
pub fn chain_slices(x: &Derivation, bounds: LndBounds) -> Vec<Polynomial> {
    (0..x.vars.len())
        .filter_map(|i| {
            let v = Polynomial::var_at(&x.vars, i);
            match chain(x, &v, x.vars.name(i), bounds) {
                Chain::Vanishes(c) if c.len() >= 2 => Some(c[c.len() - 2].clone()),
                _ => None,
            }
        })
        .collect()
}

/// An endomorphism `x_i -> images[i]` of a polynomial ring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingMap {
    pub vars: VarSet,
    pub images: Vec<Polynomial>,
}

impl RingMap {
    pub fn identity(vars: &VarSet) -> Self {
        RingMap {
            vars: vars.clone(),
            images: (0..vars.len()).map(|i| Polynomial::var_at(vars, i)).collect(),
        }
    }

    pub fn apply(&self, h: &Polynomial) -> Polynomial {
        h.embed(&self.vars)
            .expect("polynomial over the map's ring")
            .compose(&self.images, &self.vars)
    }

    /// `self ∘ other`: first `other`, then `self`.
    pub fn after(&self, other: &RingMap) -> RingMap {
        RingMap {
            vars: self.vars.clone(),
            images: other.images.iter().map(|p| self.apply(p)).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        *self == RingMap::identity(&self.vars)
    }
}

/// `h -> sigma(X(sigma_inv(h)))`.
pub fn conjugate(
    x: &Derivation,
    sigma: &RingMap,
    sigma_inv: &RingMap,
) -> Result<Derivation, DerivationError> {
    if !sigma.after(sigma_inv).is_identity() || !sigma_inv.after(sigma).is_identity() {
        return Err(DerivationError::InverseMismatch);
    }
    let images = sigma_inv
        .images
        .iter()
        .map(|t| sigma.apply(&x.apply(t)))
        .collect();
    Derivation::new(&x.vars, images)
}

/// `sum_k X^k(h) / k!`.
pub fn exp_map(x: &Derivation, h: &Polynomial, bounds: LndBounds) -> Result<Polynomial, DerivationError> {
    let mut term = h.embed(&x.vars)?;
    let mut acc = Polynomial::zero(&x.vars);
    let mut fact = Rational::one();
    for k in 0..=bounds.iterations {
        if term.is_zero() {
            return Ok(acc);
        }
        if k > 0 {
            fact *= Rational::from_integer(k.into());
        }
        acc = &acc + &term.scale(&fact.recip());
        term = x.apply(&term);
    }
    Err(DerivationError::NotNilpotentWithin {
        var: h.to_string(),
        bound: bounds.iterations,
    })
}

/// Basis of the constants of `X` of degree `1..=max_degree`, in reduced
/// echelon form over the monomials (highest graded-lex first).
pub fn kernel_basis(x: &Derivation, max_degree: u32) -> Vec<Polynomial> {
    let vars = &x.vars;
    let mut monos: Vec<Vec<u32>> = Vec::new();
    fn rec(n: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == n - 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for e in (0..=left).rev() {
            cur.push(e);
            rec(n, left - e, cur, out);
            cur.pop();
        }
    }
    for d in (1..=max_degree).rev() {
        rec(vars.len(), d, &mut Vec::new(), &mut monos);
    }
    let images: Vec<Polynomial> = monos
        .iter()
        .map(|e| x.apply(&Polynomial::monomial(vars, e.clone(), Rational::one())))
        .collect();
    // rows: target monomials, columns: source monomials
    let mut row_index: HashMap<Vec<u32>, usize> = HashMap::new();
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    for (j, img) in images.iter().enumerate() {
        for (e, c) in img.terms() {
            let r = *row_index.entry(e.clone()).or_insert_with(|| {
                rows.push(vec![Rational::zero(); monos.len()]);
                rows.len() - 1
            });
            rows[r][j] = c.clone();
        }
    }
    let pivots = rref(&mut rows, monos.len());
    let free: Vec<usize> = (0..monos.len()).filter(|j| !pivots.contains(j)).collect();
    free.iter()
        .map(|&fj| {
            let mut terms = vec![(monos[fj].clone(), Rational::one())];
            for (r, &pj) in pivots.iter().enumerate() {
                let c = &rows[r][fj];
                if !c.is_zero() {
                    terms.push((monos[pj].clone(), -c.clone()));
                }
            }
            Polynomial::from_terms(vars, terms)
        })
        .collect()
}

/// In-place reduced row echelon form; returns pivot columns by row.
pub(crate) fn rref(rows: &mut Vec<Vec<Rational>>, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for v in rows[r].iter_mut() {
            *v *= &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                let pivot_row = rows[r].clone();
                for (a, b) in rows[i].iter_mut().zip(&pivot_row) {
                    *a -= &f * b;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse;

    fn v() -> VarSet {
        VarSet::of(&["x", "y", "z"])
    }

    fn p(s: &str) -> Polynomial {
        parse(s, &v()).unwrap()
    }

    fn der(imgs: [&str; 3]) -> Derivation {
        Derivation::new(&v(), imgs.iter().map(|s| p(s)).collect()).unwrap()
    }

    #[test]
    fn jacobian_examples() {
        let dz = jacobian_derivation(&v(), &p("x"), &p("y")).unwrap();
        assert_eq!(dz, der(["0", "0", "1"]));
        let x = jacobian_derivation(&v(), &p("x"), &p("2*x*z-y^2")).unwrap();
        assert_eq!(x, der(["0", "-2*x", "-2*y"]));
        assert!(matches!(
            jacobian_derivation(&v(), &p("x"), &p("x^2")),
            Err(DerivationError::ZeroDerivation)
        ));
    }

    #[test]
    fn apply_and_iterate() {
        let dz = der(["0", "0", "1"]);
        assert_eq!(dz.apply(&p("z^2")), p("2*z"));
        let x = der(["0", "-2*x", "-2*y"]);
        assert_eq!(x.apply(&p("z")), p("-2*y"));
        assert_eq!(x.iterate(&p("z"), 2), p("4*x"));
        assert_eq!(x.iterate(&p("z"), 3), p("0"));
    }

    #[test]
    fn nilpotency() {
        let dz = der(["0", "0", "1"]);
        let verdict = is_locally_nilpotent(&dz, LndBounds::default());
        assert!(verdict.is_nilpotent());
        assert_eq!(verdict.iteration_counts, vec![1, 1, 2]);
        let rot = der(["y", "-x", "0"]);
        let verdict = is_locally_nilpotent(&rot, LndBounds::default());
        assert_eq!(verdict.status, NilpotencyStatus::ExceededBound);
        assert!(verdict.refuted());
    }

    #[test]
    fn decomposition() {
        let x = der(["0", "2*x", "2*y"]);
        let (c0, y) = irreducible_decomposition(&x).unwrap();
        assert_eq!(c0, p("1"));
        assert_eq!(y, x);
        let x = der(["0", "x^2", "x"]);
        let (c0, y) = irreducible_decomposition(&x).unwrap();
        assert_eq!(c0, p("x"));
        assert_eq!(y, der(["0", "x", "1"]));
    }

    #[test]
    fn slices() {
        let dz = der(["0", "0", "1"]);
        assert_eq!(local_slice(&dz, LndBounds::default()).unwrap(), p("z"));
        let x = der(["0", "-2*x", "-2*y"]);
        assert_eq!(local_slice(&x, LndBounds::default()).unwrap(), p("-2*y"));
    }

    #[test]
    fn conjugation() {
        let vars = v();
        let id = RingMap::identity(&vars);
        let dz = der(["0", "0", "1"]);
        assert_eq!(conjugate(&dz, &id, &id).unwrap(), dz);
        let sigma = RingMap {
            vars: vars.clone(),
            images: vec![p("x"), p("y"), p("z+x^2")],
        };
        let inv = RingMap {
            vars: vars.clone(),
            images: vec![p("x"), p("y"), p("z-x^2")],
        };
        assert_eq!(conjugate(&dz, &sigma, &inv).unwrap(), dz);
        let xdy = der(["0", "x", "0"]);
        let sigma = RingMap {
            vars: vars.clone(),
            images: vec![p("x"), p("y+z^2"), p("z")],
        };
        let inv = RingMap {
            vars: vars.clone(),
            images: vec![p("x"), p("y-z^2"), p("z")],
        };
        assert_eq!(conjugate(&xdy, &sigma, &inv).unwrap(), xdy);
        assert_eq!(
            conjugate(&xdy, &sigma, &sigma),
            Err(DerivationError::InverseMismatch)
        );
    }

    #[test]
    fn exponentials() {
        let b = LndBounds::default();
        assert_eq!(exp_map(&der(["0", "0", "1"]), &p("z"), b).unwrap(), p("z+1"));
        assert_eq!(exp_map(&der(["0", "x", "0"]), &p("y"), b).unwrap(), p("y+x"));
        let x = der(["0", "-2*x", "-2*y"]);
        let lhs = exp_map(&x, &p("y*z"), b).unwrap();
        let rhs = &exp_map(&x, &p("y"), b).unwrap() * &exp_map(&x, &p("z"), b).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn kernel_of_linear_example() {
        let x = der(["0", "-2*x", "-2*y"]);
        let basis = kernel_basis(&x, 2);
        for k in &basis {
            assert!(x.apply(k).is_zero());
        }
        // x, x^2 and 2xz - y^2 span the constants up to degree 2
        assert_eq!(basis.len(), 3);
    }
}
