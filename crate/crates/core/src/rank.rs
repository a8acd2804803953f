//! Rank of an irreducible locally nilpotent derivation of `Q[x,y,z]`.

use num_traits::{One, Zero};

use crate::derivation::{
    is_locally_nilpotent, jacobian_2, jacobian_derivation_2, local_slice, Derivation, LndBounds,
};
use crate::poly::{exact_divide, form_kth_root, gcd, PolyError, Polynomial, Rational, UniPoly, VarSet};
use crate::slices::{minimize, PlinthCertificate, SliceError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RankError {
    #[error("cannot decompose a constant")]
    Constant,
    #[error("rank undecided: {0}")]
    Indeterminate(String),
    #[error(transparent)]
    Slice(#[from] SliceError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// `C = ell(inner)` with `deg ell` maximal. `inner` has zero constant term,
/// coprime integer coefficients and a positive leading coefficient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniMultivariate {
    pub ell: UniPoly,
    pub inner: Polynomial,
}

impl UniMultivariate {
    pub fn degree(&self) -> usize {
        self.ell.degree()
    }

    /// No decomposition with `deg ell >= 2` exists.
    pub fn is_trivial(&self) -> bool {
        self.degree() == 1
    }

    pub fn reassemble(&self) -> Polynomial {
        self.ell.eval_poly(&self.inner)
    }
}

pub fn uni_multivariate_decompose(c: &Polynomial) -> Result<UniMultivariate, RankError> {
    let n = c.total_degree().filter(|&n| n > 0).ok_or(RankError::Constant)?;
    let (ell, inner) = (2..=n)
        .rev()
        .filter(|k| n % k == 0)
        .find_map(|k| try_degree(c, k))
        .unwrap_or_else(|| {
            let shifted = c - &Polynomial::constant(c.vars(), c.constant_term());
            (
                UniPoly::new(vec![c.constant_term(), Rational::one()]),
                shifted,
            )
        });
    // absorb the scale of `inner` into `ell`
    let (mu, inner) = inner.normalize();
    let mut pow = Rational::one();
    let coeffs = ell
        .coeffs()
        .iter()
        .map(|a| {
            let out = a * &pow;
            pow *= &mu;
            out
        })
        .collect();
    let out = UniMultivariate {
        ell: UniPoly::new(coeffs),
        inner,
    };
    if out.reassemble() != *c {
        return Err(RankError::Poly(PolyError::Unsupported(
            "decomposition failed to reassemble".into(),
        )));
    }
    Ok(out)
}

/// `C = ell(U)` with `deg ell = k`, solving for the homogeneous parts of `U`
/// from the top down.
fn try_degree(c: &Polynomial, k: u32) -> Option<(UniPoly, Polynomial)> {
    let n = c.total_degree()?;
    let m = n / k;
    let (a_k, top) = c.homogeneous_component(n).normalize();
    let u_m = form_kth_root(&top, k)?;
    let vars = c.vars();
    let lead_k = Polynomial::constant(vars, a_k.clone());
    let denom = &lead_k.scale_int(k as i64) * &u_m.pow(k - 1);
    let mut u = u_m.clone();
    for i in 1..m {
        let current = &lead_k * &u.pow(k);
        let r = &c.homogeneous_component(n - i) - &current.homogeneous_component(n - i);
        if r.is_zero() {
            continue;
        }
        let part = exact_divide(&r, &denom).ok()?;
        u = &u + &part;
    }
    // remaining coefficients of ell by successive subtraction
    let mut coeffs = vec![Rational::zero(); k as usize + 1];
    coeffs[k as usize] = a_k;
    let mut rest = c - &(&lead_k * &u.pow(k));
    while !rest.is_zero() {
        let d = rest.total_degree()?;
        if d % m != 0 || d / m >= k {
            return None;
        }
        let j = d / m;
        let form = rest.homogeneous_component(d);
        let base = u_m.pow(j);
        let a = form.leading_coeff() / base.leading_coeff();
        if form != base.scale(&a) {
            return None;
        }
        rest = &rest - &u.pow(j).scale(&a);
        coeffs[j as usize] = a;
    }
    Some((UniPoly::new(coeffs), u))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoordinateTest {
    /// `K[F, G] = K[U, mate]`.
    Coordinate { mate: Polynomial },
    NotCoordinate { reason: String },
    Indeterminate { reason: String },
}

/// Decides whether `u` is a coordinate of the two-variable ring it lives in,
/// through the nilpotency of `D_U = U_G d/dF - U_F d/dG`.
pub fn bivariate_coordinate_test(u: &Polynomial, bounds: LndBounds) -> CoordinateTest {
    let vars = u.vars();
    if u.is_constant() {
        return CoordinateTest::NotCoordinate {
            reason: "constant".into(),
        };
    }
    let partials = gcd(&u.derivative(0), &u.derivative(1)).expect("nonconstant input");
    if !partials.is_constant() {
        return CoordinateTest::NotCoordinate {
            reason: format!("partial derivatives share the factor {partials}"),
        };
    }
    let d = jacobian_derivation_2(vars, u).expect("nonzero Jacobian derivation");
    let verdict = is_locally_nilpotent(&d, bounds);
    if verdict.refuted() {
        return CoordinateTest::NotCoordinate {
            reason: format!("Jacobian derivation is not locally nilpotent ({:?})", verdict.stop),
        };
    }
    if !verdict.is_nilpotent() {
        return CoordinateTest::Indeterminate {
            reason: format!("nilpotency bound exceeded ({:?})", verdict.stop),
        };
    }
    let outcome = local_slice(&d, bounds)
        .map_err(SliceError::from)
        .and_then(|s0| minimize(&d, &s0, &[u.clone()], &VarSet::of(&["T"])));
    match outcome {
        Ok(m) if m.c_tags.is_constant() => {
            let jac = jacobian_2(u, &m.s);
            if jac.is_constant() && !jac.is_zero() {
                CoordinateTest::Coordinate { mate: m.s }
            } else {
                CoordinateTest::Indeterminate {
                    reason: format!("mate {} has Jacobian {jac}", m.s),
                }
            }
        }
        Ok(m) => CoordinateTest::Indeterminate {
            reason: format!("no slice found, plinth generator {}", m.c_tags),
        },
        Err(e) => CoordinateTest::Indeterminate {
            reason: e.to_string(),
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Rank {
    One,
    Two,
    Three,
}

impl Rank {
    pub fn as_u8(self) -> u8 {
        match self {
            Rank::One => 1,
            Rank::Two => 2,
            Rank::Three => 3,
        }
    }
}

/// `c = ell(u)` with `u` a coordinate of the kernel and `K[f,g] = K[u, mate]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankTwoData {
    pub u_fg: Polynomial,
    pub u_xyz: Polynomial,
    pub ell: UniPoly,
    pub mate_fg: Polynomial,
    pub mate_xyz: Polynomial,
    /// Squarefree part of `ell`.
    pub squarefree: UniPoly,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankVerdict {
    pub rank: Rank,
    pub data: Option<RankTwoData>,
    /// A slice (`X(slice) = 1`) for rank one.
    pub slice: Option<Polynomial>,
    /// Why the inner part failed, for rank three.
    pub reason: Option<String>,
    pub decomposition: Option<UniMultivariate>,
}

pub fn classify_rank(
    x: &Derivation,
    cert: &PlinthCertificate,
    bounds: LndBounds,
) -> Result<RankVerdict, RankError> {
    if let Some(c) = cert.c_xyz.constant_value() {
        let slice = cert.s.div_scalar(&c);
        debug_assert!(x.apply(&slice).is_one());
        return Ok(RankVerdict {
            rank: Rank::One,
            data: None,
            slice: Some(slice),
            reason: None,
            decomposition: None,
        });
    }
    let dec = uni_multivariate_decompose(&cert.c_fg)?;
    let gens = [cert.kernel.f.clone(), cert.kernel.g.clone()];
    match bivariate_coordinate_test(&dec.inner, bounds) {
        CoordinateTest::Coordinate { mate } => {
            let data = RankTwoData {
                u_xyz: dec.inner.compose(&gens, x.vars()),
                mate_xyz: mate.compose(&gens, x.vars()),
                u_fg: dec.inner.clone(),
                mate_fg: mate,
                squarefree: dec.ell.squarefree_part(),
                ell: dec.ell.clone(),
            };
            Ok(RankVerdict {
                rank: Rank::Two,
                data: Some(data),
                slice: None,
                reason: None,
                decomposition: Some(dec),
            })
        }
        CoordinateTest::NotCoordinate { reason } => Ok(RankVerdict {
            rank: Rank::Three,
            data: None,
            slice: None,
            reason: Some(reason),
            decomposition: Some(dec),
        }),
        CoordinateTest::Indeterminate { reason } => Err(RankError::Indeterminate(reason)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derivation::{jacobian_derivation, KernelPair};
    use crate::poly::parse;
    use crate::slices::{kernel_vars, plinth_generator};

    fn fg(s: &str) -> Polynomial {
        parse(s, &kernel_vars()).unwrap()
    }

    #[test]
    fn decompositions() {
        let d = uni_multivariate_decompose(&fg("F")).unwrap();
        assert_eq!((d.ell.clone(), d.inner.clone()), (UniPoly::from_ints(&[0, 1]), fg("F")));
        let d = uni_multivariate_decompose(&fg("(F+G^2)^2+3*(F+G^2)")).unwrap();
        assert_eq!(d.ell, UniPoly::from_ints(&[0, 3, 1]));
        assert_eq!(d.inner, fg("F+G^2"));
        let d = uni_multivariate_decompose(&fg("F*G")).unwrap();
        assert!(d.is_trivial());
        let d = uni_multivariate_decompose(&fg("-F")).unwrap();
        assert_eq!(d.ell, UniPoly::from_ints(&[0, -1]));
        let d = uni_multivariate_decompose(&fg("-(2*F-G+1)^3+(2*F-G+1)+7")).unwrap();
        assert_eq!(d.degree(), 3);
        assert_eq!(d.inner, fg("2*F-G"));
        assert!(matches!(uni_multivariate_decompose(&fg("5")), Err(RankError::Constant)));
    }

    #[test]
    fn affine_rewrites_share_inner_part() {
        let a = uni_multivariate_decompose(&fg("(F*G+G)^2")).unwrap();
        let b = uni_multivariate_decompose(&fg("(3*F*G+3*G-2)^2")).unwrap();
        assert_eq!(a.inner, b.inner);
    }

    #[test]
    fn coordinates() {
        let b = LndBounds::default();
        assert_eq!(
            bivariate_coordinate_test(&fg("F"), b),
            CoordinateTest::Coordinate { mate: fg("G") }
        );
        assert_eq!(
            bivariate_coordinate_test(&fg("F+G^2"), b),
            CoordinateTest::Coordinate { mate: fg("G") }
        );
        assert!(matches!(
            bivariate_coordinate_test(&fg("F^2+G^2"), b),
            CoordinateTest::NotCoordinate { .. }
        ));
        assert!(matches!(
            bivariate_coordinate_test(&fg("F*G"), b),
            CoordinateTest::NotCoordinate { .. }
        ));
    }

    #[test]
    fn ranks() {
        let v = VarSet::of(&["x", "y", "z"]);
        let p = |s: &str| parse(s, &v).unwrap();
        let b = LndBounds::default();
        let k = KernelPair { f: p("x"), g: p("y") };
        let x = jacobian_derivation(&v, &k.f, &k.g).unwrap();
        let cert = plinth_generator(&x, &k, b).unwrap();
        let r = classify_rank(&x, &cert, b).unwrap();
        assert_eq!(r.rank, Rank::One);
        assert_eq!(r.slice, Some(p("z")));

        let k = KernelPair { f: p("x"), g: p("y+1/4*(x*z+y^2)^2") };
        let x = jacobian_derivation(&v, &k.f, &k.g).unwrap();
        let cert = plinth_generator(&x, &k, b).unwrap();
        let r = classify_rank(&x, &cert, b).unwrap();
        assert_eq!(r.rank, Rank::Two);
        let data = r.data.unwrap();
        assert_eq!(data.u_xyz, p("x"));
        assert_eq!(data.ell, UniPoly::from_ints(&[0, -1]));
        assert_eq!(data.mate_xyz, k.g);
    }
}
