//! Deciding triangulability and building triangular coordinate systems.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::derivation::{
    irreducible_decomposition, is_locally_nilpotent, jacobian_derivation, kernel_basis, Derivation,
    DerivationError, KernelPair, LndBounds, NilpotencyVerdict,
};
use crate::groebner::{intersect_subalgebra, MonomialOrder};
use crate::poly::{
    crt_uni, exact_divide, factor_univariate, PolyError, Polynomial, Rational, UniPoly, VarSet,
};
use crate::rank::{classify_rank, Rank, RankError, RankTwoData, RankVerdict};
use crate::slices::{plinth_generator, rewrite, rewrite_in_kernel, tag_names, PlinthCertificate, SliceError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TriangulateError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl From<PolyError> for TriangulateError {
    fn from(e: PolyError) -> Self {
        TriangulateError::Internal(e.to_string())
    }
}

fn ring(names: &[&str]) -> VarSet {
    VarSet::of(names)
}

/// `(u)`, the ring of `c(u)`.
pub fn u_ring() -> VarSet {
    ring(&["u"])
}

/// `(u, p, s)`, the ring of the per-prime bases.
pub fn ups_ring() -> VarSet {
    ring(&["u", "p", "s"])
}

/// `(u, p)`, the ring of the shifts `ell`.
pub fn up_ring() -> VarSet {
    ring(&["u", "p"])
}

/// `(u, v)`, the ring of `Q`.
pub fn uv_ring() -> VarSet {
    ring(&["u", "v"])
}

/// `(u, v, w)`, the ring of the inverse expressions.
pub fn uvw_ring() -> VarSet {
    ring(&["u", "v", "w"])
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeCertificate {
    /// Irreducible factor of `c`, over `(u)`.
    pub c_i: Polynomial,
    pub n_i: u32,
    /// Second basis element of the intersection ideal, over `(u, p, s)`.
    pub h_i: Polynomial,
    /// Over `(u, p)`, reduced modulo `c_i`.
    pub ell_i: Polynomial,
    /// Over `(u)`, a unit modulo `c_i`.
    pub mu_i: Polynomial,
    /// Over `(u, v)`; `h_i = Q_i(u, s + ell_i) + mu_i p` modulo `c_i`.
    pub q_i: Polynomial,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PrimeOutcome {
    Certified(PrimeCertificate),
    Failed {
        c_i: Polynomial,
        n_i: u32,
        h_i: Option<Polynomial>,
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ShapeOutcome {
    ShapeOk(Polynomial),
    ShapeFail(Vec<Polynomial>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecompositionFail {
    /// `h` after the shift, over `(u, p, s)`.
    pub g: Polynomial,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Completion {
    Completed { w: Polynomial, q: Polynomial },
    NotCoordinate { basis: Vec<Polynomial> },
}

/// `X(u) = 0`, `X(v) = c(u)`, `X(w) = dQ/dv (u, v)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriangularForm {
    pub u: Polynomial,
    pub v: Polynomial,
    pub w: Polynomial,
    /// Over `(u)`.
    pub c: Polynomial,
    /// Over `(u, v)`.
    pub q: Polynomial,
    /// Squarefree part of `c` over `(u)`, the modulus for alternate forms.
    pub alt_modulus: Polynomial,
    /// Kernel element with `K[u, mate]` the full kernel.
    pub mate: Polynomial,
    /// `a(u)` with `X = a(u) Y`, `Y` irreducible; over `(u)`.
    pub prefactor: Polynomial,
    /// `x, y, z` as polynomials over `(u, v, w)`.
    pub inverse: Vec<Polynomial>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormCheck {
    pub ok: bool,
    pub failures: Vec<String>,
    pub inverse: Vec<Polynomial>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Rank1Triangular,
    Triangulable,
    NotTriangulable,
    Indeterminate,
    InvalidInput,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Rank1Triangular => "rank1_triangular",
            Verdict::Triangulable => "triangulable",
            Verdict::NotTriangulable => "not_triangulable",
            Verdict::Indeterminate => "indeterminate",
            Verdict::InvalidInput => "invalid_input",
        }
    }

    pub fn is_positive(self) -> bool {
        matches!(self, Verdict::Rank1Triangular | Verdict::Triangulable)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub modulus: Polynomial,
    pub h: Option<Polynomial>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundsUsed {
    pub lnd: LndBounds,
    pub kernel_search_degree: Option<u32>,
    /// Semi-decision bounds that were hit.
    pub tripped: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriangulateOptions {
    pub bounds: LndBounds,
    /// Degree limit for finding kernel generators of derivations given by
    /// their images.
    pub kernel_search_degree: u32,
}

impl Default for TriangulateOptions {
    fn default() -> Self {
        TriangulateOptions {
            bounds: LndBounds::default(),
            kernel_search_degree: 6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriangulationReport {
    pub verdict: Verdict,
    /// Normalized gcd of the images, over the input ring.
    pub prefactor: Polynomial,
    pub nilpotency: NilpotencyVerdict,
    pub kernel: Option<KernelPair>,
    pub plinth: Option<PlinthCertificate>,
    pub rank: Option<RankVerdict>,
    pub primes: Vec<PrimeOutcome>,
    pub form: Option<TriangularForm>,
    pub witness: Option<Witness>,
    pub bounds_used: BoundsUsed,
    pub notes: Vec<String>,
}

/// Reduces the `u`-coefficients (variable 0) modulo `c`.
fn reduce_mod(p: &Polynomial, c: &UniPoly) -> Polynomial {
    let mut groups: BTreeMap<Vec<u32>, Vec<(u32, Rational)>> = BTreeMap::new();
    for (e, coef) in p.terms() {
        groups
            .entry(e[1..].to_vec())
            .or_default()
            .push((e[0], coef.clone()));
    }
    let mut terms = Vec::new();
    for (rest, parts) in groups {
        let deg = parts.iter().map(|(k, _)| *k).max().unwrap_or(0) as usize;
        let mut dense = vec![Rational::zero(); deg + 1];
        for (k, a) in parts {
            dense[k as usize] = a;
        }
        for (k, a) in UniPoly::new(dense).rem(c).coeffs().iter().enumerate() {
            if !a.is_zero() {
                let mut e = vec![k as u32];
                e.extend(&rest);
                terms.push((e, a.clone()));
            }
        }
    }
    Polynomial::from_terms(p.vars(), terms)
}

fn as_uni(p: &Polynomial) -> UniPoly {
    UniPoly::from_polynomial(p, 0).expect("polynomial in the first variable only")
}

/// The reduced basis of `c_i(u) K[x,y,z] ∩ K[u,p,s]` under lex `u < p < s`,
/// expected to be `{c_i(u), h}` with `h` monic in `s`.
pub fn prime_basis(
    data: &RankTwoData,
    s: &Polynomial,
    c_i: &UniPoly,
) -> Result<ShapeOutcome, PolyError> {
    let base = s.vars().clone();
    let names = tag_names(&base, &["U", "P", "S"]);
    let tags = [
        (names[0].as_str(), data.u_xyz.clone()),
        (names[1].as_str(), data.mate_xyz.clone()),
        (names[2].as_str(), s.clone()),
    ];
    let q = c_i.eval_poly(&data.u_xyz);
    let order = MonomialOrder::lex(&[&names[2], &names[1], &names[0]]);
    let gb = intersect_subalgebra(&q, &tags, &order)?;
    let ups = ups_ring();
    let gens: Vec<Polynomial> = gb.generators.iter().map(|g| g.rename(&ups)).collect();
    let c_u = c_i.to_polynomial(&ups, 0);
    let shape_ok = gens.len() == 2 && gens[0].is_associate(&c_u) && {
        let h = &gens[1];
        let d = h.degree_in(2);
        d >= 1 && h.coefficients_in(2)[d as usize].is_one()
    };
    Ok(if shape_ok {
        ShapeOutcome::ShapeOk(gens[1].clone())
    } else {
        ShapeOutcome::ShapeFail(gens)
    })
}

/// Writes `h = Q(u, s + ell(u,p)) + mu(u) p` modulo `c_i`, if possible.
pub fn decompose_certificate(
    h: &Polynomial,
    c_i: &Polynomial,
    n_i: u32,
) -> Result<PrimeCertificate, DecompositionFail> {
    let ups = ups_ring();
    let h = h.embed(&ups).expect("h over (u, p, s)");
    let c = as_uni(c_i);
    let var = |i| Polynomial::var_at(&ups, i);
    let d = h.degree_in(2);
    let to_up = |p: &Polynomial| p.embed(&up_ring()).expect("free of s");
    let to_u = |p: &Polynomial| p.embed(&u_ring()).expect("only u");
    if d == 1 {
        let ell = reduce_mod(&(&(&h - &var(2)) - &var(1)), &c);
        return Ok(PrimeCertificate {
            c_i: c_i.clone(),
            n_i,
            h_i: h.clone(),
            ell_i: to_up(&ell),
            mu_i: Polynomial::one(&u_ring()),
            q_i: Polynomial::var_at(&uv_ring(), 1),
        });
    }
    let fail = |g: Polynomial, reason: String| DecompositionFail { g, reason };
    if d == 0 {
        return Err(fail(h.clone(), "not monic in s".into()));
    }
    let next = &h.coefficients_in(2)[d as usize - 1];
    let shift = reduce_mod(&next.div_scalar(&Rational::from_integer(d.into())), &c);
    let g = reduce_mod(&h.compose(&[var(0), var(1), &var(2) - &shift], &ups), &c);
    let dp = g.degree_in(1);
    if dp > 1 {
        return Err(fail(g, format!("p-degree {dp}")));
    }
    let by_p = g.coefficients_in(1);
    let mu = by_p.get(1).cloned().unwrap_or_else(|| Polynomial::zero(&ups));
    if mu.is_zero() {
        return Err(fail(g, "p-coefficient vanishes modulo c".into()));
    }
    if mu.involves(2) {
        return Err(fail(g, "p-coefficient involves s".into()));
    }
    let q = &g - &(&mu * &var(1));
    let uv = uv_ring();
    let q = q.compose(
        &[
            Polynomial::var_at(&uv, 0),
            Polynomial::zero(&uv),
            Polynomial::var_at(&uv, 1),
        ],
        &uv,
    );
    Ok(PrimeCertificate {
        c_i: c_i.clone(),
        n_i,
        h_i: h.clone(),
        ell_i: to_up(&shift),
        mu_i: to_u(&mu),
        q_i: q,
    })
}

/// `ell` with `ell = ell_i` modulo every `c_i`, over `(u, p)`.
pub fn assemble_ell(certs: &[PrimeCertificate]) -> Result<Polynomial, PolyError> {
    let up = up_ring();
    let moduli: Vec<UniPoly> = certs.iter().map(|c| as_uni(&c.c_i)).collect();
    let deg = certs.iter().map(|c| c.ell_i.degree_in(1)).max().unwrap_or(0) as usize;
    let mut coeffs = Vec::with_capacity(deg + 1);
    for j in 0..=deg {
        let residues: Vec<UniPoly> = certs
            .iter()
            .map(|c| {
                c.ell_i
                    .coefficients_in(1)
                    .get(j)
                    .map(as_uni)
                    .unwrap_or_else(UniPoly::zero)
            })
            .collect();
        coeffs.push(crt_uni(&residues, &moduli)?.to_polynomial(&up, 0));
    }
    Ok(Polynomial::from_coefficients_in(&up, 1, &coeffs))
}

/// `v = s + ell(u, p)` in the input ring.
pub fn assemble_v(
    certs: &[PrimeCertificate],
    s: &Polynomial,
    u: &Polynomial,
    p: &Polynomial,
) -> Result<Polynomial, PolyError> {
    let ell = assemble_ell(certs)?;
    Ok(s + &ell.compose(&[u.clone(), p.clone()], s.vars()))
}

/// Reduced basis of `c(u) K[x,y,z] ∩ K[u,v,p]` under lex `u < v < p`; when
/// it is `{c(u), p + Q(u,v)}`, returns `w = (p + Q(u,v)) / c(u)`.
pub fn complete_system(
    u: &Polynomial,
    v: &Polynomial,
    p: &Polynomial,
    c: &UniPoly,
) -> Result<Completion, PolyError> {
    let base = u.vars().clone();
    let names = tag_names(&base, &["U", "V", "P"]);
    let tags = [
        (names[0].as_str(), u.clone()),
        (names[1].as_str(), v.clone()),
        (names[2].as_str(), p.clone()),
    ];
    let modulus = c.eval_poly(u);
    let order = MonomialOrder::lex(&[&names[2], &names[1], &names[0]]);
    let gb = intersect_subalgebra(&modulus, &tags, &order)?;
    let uvp = ring(&["u", "v", "p"]);
    let gens: Vec<Polynomial> = gb.generators.iter().map(|g| g.rename(&uvp)).collect();
    let shape_ok = gens.len() == 2
        && gens[0].is_associate(&c.to_polynomial(&uvp, 0))
        && gens[1].degree_in(2) == 1
        && gens[1].coefficients_in(2)[1].is_one();
    if !shape_ok {
        return Ok(Completion::NotCoordinate { basis: gens });
    }
    let uv = uv_ring();
    let q = (&gens[1] - &Polynomial::var_at(&uvp, 2)).embed(&uv)?;
    let numer = p + &q.compose(&[u.clone(), v.clone()], &base);
    let w = exact_divide(&numer, &modulus)?;
    Ok(Completion::Completed { w, q })
}

/// Checks the triangular identities by substitution and that `x, y, z`
/// lie in `K[u, v, w]`.
pub fn verify_form(x: &Derivation, form: &TriangularForm) -> FormCheck {
    let vars = x.vars();
    let mut failures = Vec::new();
    let at_u = |p: &Polynomial| p.compose(&[form.u.clone()], vars);
    let at_uv = |p: &Polynomial| p.compose(&[form.u.clone(), form.v.clone()], vars);
    if !x.apply(&form.u).is_zero() {
        failures.push("X(u) != 0".to_string());
    }
    if x.apply(&form.v) != at_u(&form.c) {
        failures.push("X(v) != c(u)".to_string());
    }
    if x.apply(&form.w) != at_uv(&form.q.derivative(1)) {
        failures.push("X(w) != dQ/dv(u, v)".to_string());
    }
    let gens = [form.u.clone(), form.v.clone(), form.w.clone()];
    let mut inverse = Vec::new();
    let stored_expands = !form.inverse.is_empty()
        && form.inverse.iter().all(|e| weighted_degree(e, &gens) <= COMPOSE_BUDGET);
    if form.c.is_zero() && form.inverse.is_empty() {
        if let Err(why) = slice_certificate(x, form) {
            failures.push(why);
        }
    } else if form.c.is_zero() || stored_expands {
        // a stored inverse is a membership certificate
        if form.inverse.len() != vars.len() {
            failures.push("stored inverse has the wrong length".to_string());
        }
        for (i, e) in form.inverse.iter().enumerate().take(vars.len()) {
            if e.vars() != &uvw_ring() || e.compose(&gens, vars) != Polynomial::var_at(vars, i) {
                failures.push(format!("stored inverse does not give {}", vars.name(i)));
            }
        }
        inverse = form.inverse.clone();
    } else {
        match rank_two_inverse(x, form) {
            Ok(found) => {
                if !form.inverse.is_empty() && form.inverse != found {
                    failures.push("stored inverse differs from the reconstructed one".to_string());
                }
                inverse = found;
            }
            Err(why) => failures.push(why),
        }
    }
    FormCheck {
        ok: failures.is_empty(),
        failures,
        inverse,
    }
}

/// Tags of total degree at most this make the Groebner rewrite of `x, y, z`
/// cheap; above it the Dixmier construction is used.
const TAG_DEGREE_BUDGET: u32 = 8;

/// `x, y, z` over `(u, v, w)`, each checked to give back its variable.
fn rank_two_inverse(x: &Derivation, form: &TriangularForm) -> Result<Vec<Polynomial>, String> {
    let vars = x.vars();
    let gens = [form.u.clone(), form.v.clone(), form.w.clone()];
    let deg = |p: &Polynomial| p.total_degree().unwrap_or(0);
    if deg(&form.v) + deg(&form.w) <= TAG_DEGREE_BUDGET {
        return (0..vars.len())
            .map(|i| {
                let xi = Polynomial::var_at(vars, i);
                match rewrite(&xi, &gens, &uvw_ring(), None) {
                    Ok(Some(e)) if e.compose(&gens, vars) == xi => Ok(e),
                    Ok(_) => Err(format!("{} is not in K[u, v, w]", vars.name(i))),
                    Err(e) => Err(format!("membership of {} failed: {e}", vars.name(i))),
                }
            })
            .collect();
    }
    let found = local_slice_inverse(x, form)?;
    for (i, e) in found.iter().enumerate() {
        if !gives_back(e, &gens, Polynomial::var_at(vars, i)) {
            return Err(format!("inverse does not give {}", vars.name(i)));
        }
    }
    Ok(found)
}

/// Writes `x, y, z` over `(u, v, w)` with the Dixmier map of the local slice
/// `v` for the irreducible part `Y`: for `Y(v) = C(u)` and `Y^(m+1)(a) = 0`,
/// `C^m a = sum_k kappa_k v^k / k!` with every `kappa_k` in the kernel
/// `K[u, mate]`. Substituting `mate = (C w - Q) / a(u)` and dividing by
/// `C^m` exactly gives the inverse; the expression over `K[u, v, w]_C` is
/// unique, so an inexact division means `a` is not in `K[u, v, w]`.
fn local_slice_inverse(x: &Derivation, form: &TriangularForm) -> Result<Vec<Polynomial>, String> {
    let vars = x.vars();
    let err = |e: PolyError| e.to_string();
    let uvw = uvw_ring();
    // the irreducible part has the same kernel and shorter chains
    let (_, y) = irreducible_decomposition(x).map_err(|e| e.to_string())?;
    let big_c = y.apply(&form.v);
    let c_u = rewrite(&big_c, &[form.u.clone()], &u_ring(), None)
        .map_err(err)?
        .filter(|c| !c.is_zero())
        .ok_or("Y(v) is not a nonzero polynomial in u")?;
    let kernel_gens = [form.u.clone(), form.mate.clone()];
    // mate over (u, v, w)
    let lift = |p: &Polynomial| p.rename(&uvw_prefix(p.vars().len())).embed(&uvw);
    let c_uvw = lift(&form.c).map_err(err)?;
    let a_uvw = lift(&form.prefactor).map_err(err)?;
    let q_uvw = lift(&form.q).map_err(err)?;
    let numer = &(&c_uvw * &Polynomial::var_at(&uvw, 2)) - &q_uvw;
    let mate_uvw = exact_divide(&numer, &a_uvw).map_err(|_| "Q is not divisible by the prefactor".to_string())?;
    let uvw_images = [form.u.clone(), form.v.clone(), form.w.clone()];
    if mate_uvw.compose(&uvw_images, vars) != form.mate {
        return Err("mate != (c(u) w - Q(u, v)) / a(u)".into());
    }
    let sub = [Polynomial::var_at(&uvw, 0), mate_uvw];
    let v_uvw = Polynomial::var_at(&uvw, 1);

    let mut inverse = Vec::with_capacity(vars.len());
    for i in 0..vars.len() {
        let mut chain = vec![Polynomial::var_at(vars, i)];
        loop {
            let next = y.apply(chain.last().expect("nonempty"));
            if next.is_zero() {
                break;
            }
            if chain.len() > LndBounds::default().iterations {
                return Err(format!("{} is not nilpotent within the bound", vars.name(i)));
            }
            chain.push(next);
        }
        let m = chain.len() - 1;
        let c_pows: Vec<Polynomial> = (0..=m).scan(Polynomial::one(vars), |acc, k| {
            let out = acc.clone();
            if k < m {
                *acc = &*acc * &big_c;
            }
            Some(out)
        })
        .collect();
        let v_pows: Vec<Polynomial> = (0..=m).scan(Polynomial::one(vars), |acc, _| {
            let out = acc.clone();
            *acc = &*acc * &form.v;
            Some(out)
        })
        .collect();
        let mut total = Polynomial::zero(&uvw);
        let mut vk = Polynomial::one(&uvw);
        let mut k_fact = Rational::from_integer(1.into());
        for k in 0..=m {
            if k > 0 {
                vk = &vk * &v_uvw;
                k_fact *= Rational::from_integer(k.into());
            }
            let mut kappa = Polynomial::zero(vars);
            let mut j_fact = Rational::from_integer(1.into());
            for j in 0..=m - k {
                if j > 0 {
                    j_fact *= Rational::from_integer(j.into());
                }
                let t = (&(&chain[j + k] * &v_pows[j]) * &c_pows[m - k - j]).div_scalar(&j_fact);
                kappa = if j % 2 == 0 { &kappa + &t } else { &kappa - &t };
            }
            let h = rewrite(&kappa, &kernel_gens, &up_ring(), None)
                .map_err(err)?
                .ok_or_else(|| format!("a Dixmier coefficient of {} is outside K[u, mate]", vars.name(i)))?;
            let h = h.compose(&sub, &uvw);
            total = &total + &(&h * &vk).div_scalar(&k_fact);
        }
        let denom = lift(&c_u).map_err(err)?.pow(m as u32);
        let e = exact_divide(&total, &denom)
            .map_err(|_| format!("{} is not in K[u, v, w]", vars.name(i)))?;
        inverse.push(e);
    }
    Ok(inverse)
}

/// Weighted degree above which `e(u, v, w)` is checked at sample points
/// instead of expanded; the construction in `local_slice_inverse` is exact,
/// so this only guards the implementation.
const COMPOSE_BUDGET: u32 = 40;

/// Degree of `e(gens)` before cancellation.
fn weighted_degree(e: &Polynomial, gens: &[Polynomial; 3]) -> u32 {
    let weights: Vec<u32> = gens.iter().map(|g| g.total_degree().unwrap_or(0)).collect();
    e.terms()
        .map(|(k, _)| k.iter().zip(&weights).map(|(a, b)| a * b).sum::<u32>())
        .max()
        .unwrap_or(0)
}

fn gives_back(e: &Polynomial, gens: &[Polynomial; 3], target: Polynomial) -> bool {
    let vars = target.vars();
    if weighted_degree(e, gens) <= COMPOSE_BUDGET {
        return e.compose(gens, vars) == target;
    }
    let points: [[i64; 3]; 4] = [[2, -3, 5], [-1, 4, 7], [3, 1, -2], [-5, -2, 11]];
    points.iter().all(|pt| {
        let pt: Vec<Rational> = pt.iter().map(|&a| Rational::from_integer(a.into())).collect();
        let at: Vec<Rational> = gens.iter().map(|g| g.eval(&pt)).collect();
        e.eval(&at) == target.eval(&pt)
    })
}

fn uvw_prefix(n: usize) -> VarSet {
    ring(&["u", "v", "w"][..n])
}

/// Membership for `c = 0` without an inverse: `w` is a slice of the
/// irreducible part `Y`, `Y` is locally nilpotent and `Jac(u, v, .)` is a
/// constant multiple of `Y`, so `ker Y = K[u, v]` and the ring is
/// `K[u, v][w]`.
fn slice_certificate(x: &Derivation, form: &TriangularForm) -> Result<(), String> {
    let (_, y) = irreducible_decomposition(x).map_err(|e| e.to_string())?;
    if !y.apply(&form.w).constant_value().is_some_and(|c| !c.is_zero()) {
        return Err("w is not a slice of the irreducible part".into());
    }
    if !is_locally_nilpotent(&y, LndBounds::default()).is_nilpotent() {
        return Err("the irreducible part is not certified locally nilpotent".into());
    }
    let jac = jacobian_derivation(x.vars(), &form.u, &form.v)
        .map_err(|_| "u and v are dependent".to_string())?;
    if constant_multiple(&jac, &y).is_none() {
        return Err("Jac(u, v, .) is not a constant multiple of the irreducible part".into());
    }
    Ok(())
}

/// A pair of kernel elements whose Jacobian derivation is a nonzero constant
/// multiple of the irreducible `y`; then they generate the kernel.
pub fn find_kernel_pair(y: &Derivation, max_degree: u32) -> Option<KernelPair> {
    for d in 1..=max_degree {
        let mut basis = kernel_basis(y, d);
        if basis.len() < 2 {
            continue;
        }
        basis.sort_by_key(|b| b.total_degree());
        for i in 0..basis.len() {
            for j in i + 1..basis.len() {
                let (f, g) = (&basis[i], &basis[j]);
                if let Ok(jac) = jacobian_derivation(y.vars(), f, g) {
                    if constant_multiple(&jac, y).is_some() {
                        return Some(KernelPair {
                            f: f.normalized(),
                            g: g.normalized(),
                        });
                    }
                }
            }
        }
    }
    None
}

/// `lambda` with `a = lambda * b`, both derivations of the same ring.
fn constant_multiple(a: &Derivation, b: &Derivation) -> Option<Rational> {
    let (i, bi) = b.images().iter().enumerate().find(|(_, p)| !p.is_zero())?;
    let lambda = a.image(i).leading_coeff() / bi.leading_coeff();
    if lambda.is_zero() {
        return None;
    }
    a.images()
        .iter()
        .zip(b.images())
        .all(|(p, q)| *p == q.scale(&lambda))
        .then_some(lambda)
}

struct Builder {
    report: TriangulationReport,
}

impl Builder {
    fn finish(mut self, verdict: Verdict) -> TriangulationReport {
        self.report.verdict = verdict;
        self.report
    }

    fn refute(mut self, modulus: Polynomial, h: Option<Polynomial>, reason: String) -> TriangulationReport {
        self.report.witness = Some(Witness { modulus, h, reason });
        self.finish(Verdict::NotTriangulable)
    }

    fn undecided(mut self, what: String) -> TriangulationReport {
        self.report.bounds_used.tripped.push(what);
        self.finish(Verdict::Indeterminate)
    }
}

/// Runs the whole decision procedure on a locally nilpotent derivation of a
/// three-variable ring. Without `kernel`, generators are searched among
/// constants of bounded degree.
pub fn triangulate(
    x: &Derivation,
    kernel: Option<&KernelPair>,
    opts: &TriangulateOptions,
) -> Result<TriangulationReport, TriangulateError> {
    let vars = x.vars().clone();
    if vars.len() != 3 {
        return Err(TriangulateError::InvalidInput(format!(
            "expected three variables, got {}",
            vars.len()
        )));
    }
    let bounds = opts.bounds;
    let nilpotency = is_locally_nilpotent(x, bounds);
    if nilpotency.refuted() {
        return Err(TriangulateError::InvalidInput(format!(
            "the derivation is not locally nilpotent: {:?}",
            nilpotency.stop
        )));
    }
    let mut b = Builder {
        report: TriangulationReport {
            verdict: Verdict::Indeterminate,
            prefactor: Polynomial::one(&vars),
            nilpotency: nilpotency.clone(),
            kernel: None,
            plinth: None,
            rank: None,
            primes: Vec::new(),
            form: None,
            witness: None,
            bounds_used: BoundsUsed {
                lnd: bounds,
                kernel_search_degree: kernel.is_none().then_some(opts.kernel_search_degree),
                tripped: Vec::new(),
            },
            notes: Vec::new(),
        },
    };
    if !nilpotency.is_nilpotent() {
        return Ok(b.undecided(format!("nilpotency check stopped: {:?}", nilpotency.stop)));
    }

    let (c0, y) = irreducible_decomposition(x).map_err(|e| TriangulateError::Internal(e.to_string()))?;
    b.report.prefactor = c0.clone();

    let kernel = match kernel {
        Some(k) => {
            let k = KernelPair {
                f: k.f.embed(&vars)?,
                g: k.g.embed(&vars)?,
            };
            if !x.apply(&k.f).is_zero() || !x.apply(&k.g).is_zero() {
                return Err(TriangulateError::InvalidInput(
                    "kernel contract: X(f) or X(g) is nonzero".into(),
                ));
            }
            let jac = jacobian_derivation(&vars, &k.f, &k.g).map_err(|_| {
                TriangulateError::InvalidInput("kernel contract: f and g are dependent".into())
            })?;
            if constant_multiple(&jac, &y).is_none() {
                return Err(TriangulateError::InvalidInput(
                    "kernel contract: Jac(f, g, .) is not a constant multiple of the irreducible part, so f and g do not generate the kernel".into(),
                ));
            }
            k
        }
        None => match find_kernel_pair(&y, opts.kernel_search_degree) {
            Some(k) => k,
            None => {
                return Ok(b.undecided(format!(
                    "no kernel generators of degree <= {}",
                    opts.kernel_search_degree
                )))
            }
        },
    };
    b.report.kernel = Some(kernel.clone());

    let mut cert = match plinth_generator(&y, &kernel, bounds) {
        Ok(c) => c,
        Err(SliceError::Derivation(DerivationError::NotNilpotentWithin { var, bound })) => {
            return Ok(b.undecided(format!("slice chain of {var} exceeded {bound} steps")))
        }
        Err(SliceError::OutsideKernel(c)) => {
            return Err(TriangulateError::InvalidInput(format!(
                "kernel contract: the constant {c} is not in K[f, g]"
            )))
        }
        Err(e) => return Err(TriangulateError::Internal(e.to_string())),
    };

    let rank = match classify_rank(&y, &cert, bounds) {
        Ok(r) => r,
        Err(RankError::Indeterminate(why)) => {
            b.report.plinth = Some(cert);
            return Ok(b.undecided(format!("coordinate test: {why}")));
        }
        Err(e) => return Err(TriangulateError::Internal(e.to_string())),
    };
    if let Some(data) = &rank.data {
        cert.squarefree_part = Some(data.squarefree.to_polynomial(&u_ring(), 0));
    }
    b.report.plinth = Some(cert.clone());
    b.report.rank = Some(rank.clone());

    match rank.rank {
        Rank::One => {
            let slice = rank.slice.clone().expect("rank one carries a slice");
            let c0_fg = rewrite_in_kernel(&c0, &kernel)?.ok_or_else(|| {
                TriangulateError::Internal("prefactor outside the kernel".into())
            })?;
            let uv = uv_ring();
            let q = integrate_v(&c0_fg.rename(&uv));
            let form = TriangularForm {
                u: kernel.f.clone(),
                v: kernel.g.clone(),
                w: slice.clone(),
                c: Polynomial::zero(&u_ring()),
                q,
                alt_modulus: Polynomial::one(&u_ring()),
                mate: kernel.g.clone(),
                prefactor: Polynomial::one(&u_ring()),
                inverse: slice_inverse(&y, &slice, &kernel, bounds)?,
            };
            finish_positive(b, x, form, Verdict::Rank1Triangular)
        }
        Rank::Three => {
            let reason = format!(
                "rank 3: the plinth generator's inner part is not a coordinate of the kernel ({})",
                rank.reason.clone().unwrap_or_default()
            );
            Ok(b.refute(cert.c_fg.clone(), None, reason))
        }
        Rank::Two => {
            let data = rank.data.clone().expect("rank two carries data");
            rank_two(b, x, &c0, &cert, &data)
        }
    }
}

const SLICE_INVERSE_BUDGET: u32 = 10;

/// `x_i = sum_k pi(Y^k x_i) w^k / k!` over `(u, v, w) = (f, g, w)`, where
/// `Y(w) = 1` and `pi` is the Dixmier map of `w` onto the kernel.
fn slice_inverse(
    y: &Derivation,
    w: &Polynomial,
    kernel: &KernelPair,
    bounds: LndBounds,
) -> Result<Vec<Polynomial>, TriangulateError> {
    let vars = y.vars();
    let uvw = uvw_ring();
    let uv = uv_ring();
    let series = |h: &Polynomial| -> Result<Vec<Polynomial>, TriangulateError> {
        // h, Y(h), Y^2(h), ... until zero
        let mut out = Vec::new();
        let mut t = h.clone();
        while !t.is_zero() {
            if out.len() > bounds.iterations {
                return Err(TriangulateError::Internal("slice chain exceeded the bound".into()));
            }
            let next = y.apply(&t);
            out.push(t);
            t = next;
        }
        Ok(out)
    };
    let pi = |h: &Polynomial| -> Result<Polynomial, TriangulateError> {
        let mut acc = Polynomial::zero(vars);
        let mut wk = Polynomial::one(vars);
        let mut fact = Rational::from_integer(1.into());
        for (k, t) in series(h)?.iter().enumerate() {
            if k > 0 {
                fact *= Rational::from_integer(k.into());
                wk = &wk * w;
            }
            let term = (&wk * t).div_scalar(&fact);
            acc = if k % 2 == 0 { &acc + &term } else { &acc - &term };
        }
        Ok(acc)
    };
    // skip when the powers of w get expensive; the slice certificate covers membership
    let chains: Vec<Vec<Polynomial>> = (0..vars.len())
        .map(|i| series(&Polynomial::var_at(vars, i)))
        .collect::<Result<_, _>>()?;
    let longest = chains.iter().map(Vec::len).max().unwrap_or(0) as u32;
    let kernel_degree = kernel.f.total_degree().max(kernel.g.total_degree()).unwrap_or(0);
    if w.total_degree().unwrap_or(0) * longest.saturating_sub(1) + kernel_degree > SLICE_INVERSE_BUDGET {
        return Ok(Vec::new());
    }
    let w_var = Polynomial::var_at(&uvw, 2);
    let mut inverse = Vec::new();
    for i in 0..vars.len() {
        let mut acc = Polynomial::zero(&uvw);
        let mut wk = Polynomial::one(&uvw);
        let mut fact = Rational::from_integer(1.into());
        for (k, t) in chains[i].iter().enumerate() {
            if k > 0 {
                fact *= Rational::from_integer(k.into());
                wk = &wk * &w_var;
            }
            let h = rewrite_in_kernel(&pi(t)?, kernel)?
                .ok_or_else(|| TriangulateError::Internal("Dixmier image outside the kernel".into()))?;
            acc = &acc + &(&h.rename(&uv).embed(&uvw)? * &wk).div_scalar(&fact);
        }
        inverse.push(acc);
    }
    Ok(inverse)
}

/// Antiderivative in the second variable.
fn integrate_v(p: &Polynomial) -> Polynomial {
    Polynomial::from_terms(
        p.vars(),
        p.terms().map(|(e, c)| {
            let mut e = e.clone();
            e[1] += 1;
            (e.clone(), c / Rational::from_integer(e[1].into()))
        }),
    )
}

fn finish_positive(
    mut b: Builder,
    x: &Derivation,
    mut form: TriangularForm,
    verdict: Verdict,
) -> Result<TriangulationReport, TriangulateError> {
    let check = verify_form(x, &form);
    if !check.ok {
        return Err(TriangulateError::Internal(format!(
            "triangular form failed verification: {}",
            check.failures.join("; ")
        )));
    }
    form.inverse = check.inverse;
    b.report.form = Some(form);
    Ok(b.finish(verdict))
}

fn rank_two(
    mut b: Builder,
    x: &Derivation,
    c0: &Polynomial,
    cert: &PlinthCertificate,
    data: &RankTwoData,
) -> Result<TriangulationReport, TriangulateError> {
    let u_ring = u_ring();
    // X = a(u) Y requires a in K[u]
    let prefactor = if c0.is_constant() {
        Polynomial::one(&u_ring)
    } else {
        match rewrite(c0, &[data.u_xyz.clone()], &u_ring, None)? {
            Some(a) => a,
            None => {
                return Ok(b.refute(
                    c0.clone(),
                    None,
                    "the content of the derivation is not a polynomial in u".into(),
                ))
            }
        }
    };

    let ell_u = data.ell.to_polynomial(&u_ring, 0);
    let factors = factor_univariate(&ell_u)?;
    let mut certs = Vec::new();
    for (c_i, n_i) in &factors.factors {
        let c_uni = as_uni(c_i);
        match prime_basis(data, &cert.s, &c_uni)? {
            ShapeOutcome::ShapeFail(basis) => {
                let listing: Vec<String> = basis.iter().map(ToString::to_string).collect();
                b.report.primes.push(PrimeOutcome::Failed {
                    c_i: c_i.clone(),
                    n_i: *n_i,
                    h_i: None,
                    reason: format!("unexpected basis shape [{}]", listing.join(", ")),
                });
                b.report.witness = Some(Witness {
                    modulus: c_i.clone(),
                    h: None,
                    reason: "basis shape violates the kernel/slice preconditions".into(),
                });
                return Ok(b.finish(Verdict::InvalidInput));
            }
            ShapeOutcome::ShapeOk(h) => match decompose_certificate(&h, c_i, *n_i) {
                Ok(pc) => {
                    b.report.primes.push(PrimeOutcome::Certified(pc.clone()));
                    certs.push(pc);
                }
                Err(fail) => {
                    b.report.primes.push(PrimeOutcome::Failed {
                        c_i: c_i.clone(),
                        n_i: *n_i,
                        h_i: Some(h.clone()),
                        reason: fail.reason.clone(),
                    });
                    return Ok(b.refute(c_i.clone(), Some(h), fail.reason));
                }
            },
        }
    }

    // scale v so that X(v) is the normalized c(u)
    let (lambda, c_norm) = ell_u.normalize();
    let v = assemble_v(&certs, &cert.s, &data.u_xyz, &data.mate_xyz)?.div_scalar(&lambda);
    let c_uni = as_uni(&c_norm);
    match complete_system(&data.u_xyz, &v, &data.mate_xyz, &c_uni)? {
        Completion::NotCoordinate { basis } => {
            let listing: Vec<String> = basis.iter().map(ToString::to_string).collect();
            Ok(b.refute(
                c_norm,
                None,
                format!("v is not a coordinate; completion basis [{}]", listing.join(", ")),
            ))
        }
        Completion::Completed { w, q } => {
            let uv = uv_ring();
            let a_uv = prefactor.embed(&uv)?;
            let alt = data.squarefree.to_polynomial(&u_ring, 0).normalized();
            let form = TriangularForm {
                u: data.u_xyz.clone(),
                v,
                w,
                c: &prefactor * &c_norm,
                q: &a_uv * &q,
                alt_modulus: alt,
                mate: data.mate_xyz.clone(),
                prefactor,
                inverse: Vec::new(),
            };
            finish_positive(b, x, form, Verdict::Triangulable)
        }
    }
}

/// `X` in the coordinates of `form`: `(0, c(u), dQ/dv(u, v))` over `(u, v, w)`.
pub fn triangular_derivation(form: &TriangularForm) -> Result<Derivation, TriangulateError> {
    let uvw = uvw_ring();
    let u = Polynomial::var_at(&uvw, 0);
    let v = Polynomial::var_at(&uvw, 1);
    let images = vec![
        Polynomial::zero(&uvw),
        form.c.compose(&[u.clone()], &uvw),
        form.q.derivative(1).compose(&[u, v], &uvw),
    ];
    Derivation::new(&uvw, images).map_err(|e| TriangulateError::Internal(e.to_string()))
}

/// An alternate system, also written over the coordinates of the form it
/// was derived from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlternateForm {
    pub form: TriangularForm,
    /// `u, v', w'` as polynomials in the base `(u, v, w)`; its inverse
    /// gives the base coordinates in terms of the new ones.
    pub relative: TriangularForm,
}

/// Another triangular form: `v' = v + d(u) r(u, p)` with `d` the squarefree
/// part of `c`, completed again. `r` lives over `(u, p)`. The work happens
/// in the coordinates of `form`, which must carry its inverse.
pub fn alternate_form(
    x: &Derivation,
    form: &TriangularForm,
    r: &Polynomial,
) -> Result<Option<AlternateForm>, TriangulateError> {
    if form.c.is_zero() {
        return Err(TriangulateError::InvalidInput(
            "alternate forms need a nonzero c(u)".into(),
        ));
    }
    if form.inverse.len() != x.vars().len() {
        return Err(TriangulateError::InvalidInput(
            "the base form carries no inverse".into(),
        ));
    }
    let uvw = uvw_ring();
    let u = Polynomial::var_at(&uvw, 0);
    let mate = form.mate.compose(&form.inverse, &uvw);
    let d = form.alt_modulus.compose(&[u.clone()], &uvw);
    let shift = r.embed(&up_ring())?.compose(&[u.clone(), mate.clone()], &uvw);
    let v = &Polynomial::var_at(&uvw, 1) + &(&d * &shift);
    let c_y = exact_divide(&form.c, &form.prefactor)?;
    let (w, q) = match complete_system(&u, &v, &mate, &as_uni(&c_y))? {
        Completion::NotCoordinate { .. } => return Ok(None),
        Completion::Completed { w, q } => (w, q),
    };
    let mut relative = TriangularForm {
        u,
        v,
        w,
        q: &form.prefactor.embed(&uv_ring())? * &q,
        mate,
        inverse: Vec::new(),
        ..form.clone()
    };
    let check = verify_form(&triangular_derivation(form)?, &relative);
    if !check.ok {
        return Ok(None);
    }
    relative.inverse = check.inverse;
    let base = [form.u.clone(), form.v.clone(), form.w.clone()];
    let out = TriangularForm {
        v: relative.v.compose(&base, x.vars()),
        w: relative.w.compose(&base, x.vars()),
        q: relative.q.clone(),
        inverse: form
            .inverse
            .iter()
            .map(|e| e.compose(&relative.inverse, &uvw))
            .collect(),
        ..form.clone()
    };
    Ok(Some(AlternateForm { form: out, relative }))
}

/// Verifies an alternate system through its base: the base form against
/// `x`, the relative form against the base's triangular derivation, and
/// that the two agree.
pub fn verify_alternate(x: &Derivation, base: &TriangularForm, alt: &AlternateForm) -> FormCheck {
    let mut failures = Vec::new();
    let outer = verify_form(x, base);
    failures.extend(outer.failures.iter().map(|f| format!("base: {f}")));
    match triangular_derivation(base) {
        Ok(y) => {
            let inner = verify_form(&y, &alt.relative);
            failures.extend(inner.failures.iter().map(|f| format!("relative: {f}")));
        }
        Err(e) => failures.push(e.to_string()),
    }
    let coords = [base.u.clone(), base.v.clone(), base.w.clone()];
    let rel = &alt.relative;
    if rel.u.compose(&coords, x.vars()) != alt.form.u
        || rel.v.compose(&coords, x.vars()) != alt.form.v
        || rel.w.compose(&coords, x.vars()) != alt.form.w
    {
        failures.push("alternate coordinates disagree with the relative form".into());
    }
    if (alt.form.c.clone(), alt.form.q.clone()) != (rel.c.clone(), rel.q.clone()) {
        failures.push("alternate images disagree with the relative form".into());
    }
    let uvw = uvw_ring();
    let inverse: Vec<Polynomial> = base.inverse.iter().map(|e| e.compose(&rel.inverse, &uvw)).collect();
    if inverse != alt.form.inverse {
        failures.push("alternate inverse disagrees with the composed inverse".into());
    }
    FormCheck {
        ok: failures.is_empty(),
        failures,
        inverse,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derivation::jacobian_derivation;
    use crate::poly::parse;

    fn v3() -> VarSet {
        VarSet::of(&["x", "y", "z"])
    }

    fn p(s: &str) -> Polynomial {
        parse(s, &v3()).unwrap()
    }

    fn run(f: &str, g: &str) -> TriangulationReport {
        let k = KernelPair { f: p(f), g: p(g) };
        let x = jacobian_derivation(&v3(), &k.f, &k.g).unwrap();
        triangulate(&x, Some(&k), &TriangulateOptions::default()).unwrap()
    }

    #[test]
    fn partial_z_is_rank_one() {
        let r = run("x", "y");
        assert_eq!(r.verdict, Verdict::Rank1Triangular);
        let form = r.form.unwrap();
        assert_eq!((form.u, form.v, form.w), (p("x"), p("y"), p("z")));
    }

    #[test]
    fn decomposition_certificates() {
        let ups = ups_ring();
        let h = parse("s^2-2*s+p+1", &ups).unwrap();
        let c = parse("u", &u_ring()).unwrap();
        let cert = decompose_certificate(&h, &c, 1).unwrap();
        assert_eq!(cert.ell_i, parse("-1", &up_ring()).unwrap());
        assert_eq!(cert.mu_i, parse("1", &u_ring()).unwrap());
        assert_eq!(cert.q_i, parse("v^2", &uv_ring()).unwrap());

        let h = parse("(s^2-4*p)^2+16*s", &ups).unwrap();
        let fail = decompose_certificate(&h, &c, 1).unwrap_err();
        assert_eq!(fail.reason, "p-degree 2");

        let h = parse("s+p", &ups).unwrap();
        let c1 = parse("u-1", &u_ring()).unwrap();
        let cert = decompose_certificate(&h, &c1, 1).unwrap();
        assert!(cert.ell_i.is_zero());
        assert_eq!(cert.q_i, parse("v", &uv_ring()).unwrap());
    }

    #[test]
    fn crt_of_shifts() {
        let up = up_ring();
        let mk = |c: &str, ell: &str| PrimeCertificate {
            c_i: parse(c, &u_ring()).unwrap(),
            n_i: 1,
            h_i: Polynomial::zero(&ups_ring()),
            ell_i: parse(ell, &up).unwrap(),
            mu_i: Polynomial::one(&u_ring()),
            q_i: Polynomial::zero(&uv_ring()),
        };
        let ell = assemble_ell(&[mk("u", "0"), mk("u-1", "p")]).unwrap();
        assert_eq!(ell, parse("u*p", &up).unwrap());
        let ell = assemble_ell(&[mk("u", "0")]).unwrap();
        assert!(ell.is_zero());
    }

    #[test]
    fn tampered_form_fails() {
        let x = jacobian_derivation(&v3(), &p("x"), &p("y")).unwrap();
        let form = TriangularForm {
            u: p("x"),
            v: p("y"),
            w: p("z+1"),
            c: Polynomial::zero(&u_ring()),
            q: parse("v", &uv_ring()).unwrap(),
            alt_modulus: Polynomial::one(&u_ring()),
            mate: p("y"),
            prefactor: Polynomial::one(&u_ring()),
            inverse: Vec::new(),
        };
        assert!(verify_form(&x, &form).ok);
        let bad = TriangularForm {
            w: p("2*z"),
            ..form
        };
        let check = verify_form(&x, &bad);
        assert!(!check.ok);
        assert_eq!(check.failures, vec!["X(w) != dQ/dv(u, v)".to_string()]);
    }

    #[test]
    fn kernel_search() {
        let v = v3();
        let y = Derivation::new(&v, vec![p("0"), p("x"), p("y")]).unwrap();
        let k = find_kernel_pair(&y, 3).unwrap();
        assert!(y.apply(&k.f).is_zero() && y.apply(&k.g).is_zero());
    }

    #[test]
    fn prefactor_in_u() {
        let v = v3();
        // x (x d/dy + y d/dz)
        let x = Derivation::new(&v, vec![p("0"), p("x^2"), p("x*y")]).unwrap();
        let r = triangulate(&x, None, &TriangulateOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Triangulable);
        // y d/dz with content x + y is still triangular in (x, y, z)
        let x = Derivation::new(&v, vec![p("0"), p("0"), p("x+y")]).unwrap();
        let r = triangulate(&x, None, &TriangulateOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Rank1Triangular);
    }

    #[test]
    fn contract_violations() {
        let v = v3();
        let x = jacobian_derivation(&v, &p("x"), &p("y^2")).unwrap();
        let k = KernelPair { f: p("x"), g: p("y^2") };
        assert!(matches!(
            triangulate(&x, Some(&k), &TriangulateOptions::default()),
            Err(TriangulateError::InvalidInput(_))
        ));
        let rot = Derivation::new(&v, vec![p("y"), p("-x"), p("0")]).unwrap();
        assert!(matches!(
            triangulate(&rot, None, &TriangulateOptions::default()),
            Err(TriangulateError::InvalidInput(_))
        ));
    }

    #[test]
    fn alternate_of_nested_form() {
        // x d/dy + y d/dz, c = u
        let x = Derivation::new(&v3(), vec![p("0"), p("x"), p("y")]).unwrap();
        let r = triangulate(&x, None, &TriangulateOptions::default()).unwrap();
        let form = r.form.unwrap();
        let rr = parse("u*p+p^2-2", &up_ring()).unwrap();
        let alt = alternate_form(&x, &form, &rr).unwrap().expect("completes");
        assert!(verify_alternate(&x, &form, &alt).ok);
        assert!(verify_form(&x, &alt.form).ok);
        assert_ne!(alt.form.v, form.v);
    }
}
