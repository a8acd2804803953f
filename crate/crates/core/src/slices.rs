//! Minimal local slices and generators of the plinth ideal.

use crate::derivation::{local_slice, rref, Derivation, DerivationError, KernelPair, LndBounds};
use crate::groebner::{subalgebra_membership, MonomialOrder, SubalgebraIdeal};
use crate::poly::{exact_divide, factor, PolyError, Polynomial, Rational, VarSet};
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SliceError {
    #[error("`{0}` is not a local slice")]
    NotLocalSlice(String),
    #[error("`{0}` is a constant of the derivation outside the given kernel")]
    OutsideKernel(String),
    #[error(transparent)]
    Derivation(#[from] DerivationError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// A minimal local slice `s` together with `X(s)`, which generates the
/// plinth ideal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlinthCertificate {
    pub s: Polynomial,
    pub c_xyz: Polynomial,
    /// `X(s)` written in the kernel generators, over `(F, G)`.
    pub c_fg: Polynomial,
    pub kernel: KernelPair,
    /// Squarefree part of `c` as a polynomial in `u`, once the rank stage
    /// has found `u`.
    pub squarefree_part: Option<Polynomial>,
}

/// Variables naming the kernel generators.
pub fn kernel_vars() -> VarSet {
    VarSet::of(&["F", "G"])
}

/// Tag names for `wanted` that avoid every name in `base`.
pub(crate) fn tag_names(base: &VarSet, wanted: &[&str]) -> Vec<String> {
    let mut taken = base.clone();
    wanted
        .iter()
        .map(|w| {
            let n = taken.fresh_name(w);
            taken = taken.extended(&[n.as_str()]);
            n
        })
        .collect()
}

/// `H` over `target` with `h - H(gens)` in `(modulus)`, or `h = H(gens)`
/// without a modulus.
pub(crate) fn rewrite(
    h: &Polynomial,
    gens: &[Polynomial],
    target: &VarSet,
    modulus: Option<&Polynomial>,
) -> Result<Option<Polynomial>, PolyError> {
    let mut base = h.vars().clone();
    for g in gens.iter().chain(modulus) {
        base = base.union(g.vars());
    }
    let wanted: Vec<&str> = target.names().iter().map(String::as_str).collect();
    let names = tag_names(&base, &wanted);
    let tags: Vec<(&str, Polynomial)> = names
        .iter()
        .map(String::as_str)
        .zip(gens.iter().cloned())
        .collect();
    let h = h.embed(&base)?;
    if modulus.is_none() {
        let gens: Vec<Polynomial> = gens.iter().map(|g| g.embed(&base)).collect::<Result<_, _>>()?;
        if let Some(found) = peel(&h, &gens, target) {
            return Ok(found);
        }
        if let Some(found) = interpolate(&h, &gens, target) {
            return Ok(Some(found));
        }
    }
    let modulus = modulus.map(|q| q.embed(&base)).transpose()?;
    Ok(subalgebra_membership(&h, &tags, modulus.as_ref())?.map(|p| p.rename(target)))
}

/// Candidate monomial orders as key functions: lex and graded lex over every
/// ranking of the variables.
fn candidate_orders(n: usize) -> Vec<(bool, Vec<usize>)> {
    fn perms(rest: Vec<usize>) -> Vec<Vec<usize>> {
        if rest.len() <= 1 {
            return vec![rest];
        }
        let mut out = Vec::new();
        for (i, &first) in rest.iter().enumerate() {
            let mut others = rest.clone();
            others.remove(i);
            for mut p in perms(others) {
                p.insert(0, first);
                out.push(p);
            }
        }
        out
    }
    let all = perms((0..n).collect());
    [false, true]
        .into_iter()
        .flat_map(|graded| all.iter().map(move |p| (graded, p.clone())))
        .collect()
}

fn order_key(e: &[u32], graded: bool, rank: &[usize]) -> Vec<u32> {
    let mut k = Vec::with_capacity(rank.len() + 1);
    if graded {
        k.push(e.iter().sum());
    }
    k.extend(rank.iter().map(|&i| e[i]));
    k
}

/// `(i, j)` with `i a + j b = e` for linearly independent `a, b` (`b`
/// absent for one generator).
fn solve_exponents(e: &[u32], leads: &[Vec<u32>]) -> Option<Vec<u32>> {
    let n = e.len();
    let coeffs: Vec<i64> = match leads {
        [a] => {
            let i = (0..n).find(|&i| a[i] > 0)?;
            if e[i] % a[i] != 0 {
                return None;
            }
            vec![(e[i] / a[i]) as i64]
        }
        [a, b] => {
            let (i, j, det) = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .map(|(i, j)| (i, j, a[i] as i64 * b[j] as i64 - a[j] as i64 * b[i] as i64))
                .find(|t| t.2 != 0)?;
            let (ei, ej) = (e[i] as i64, e[j] as i64);
            let x = ei * b[j] as i64 - ej * b[i] as i64;
            let y = a[i] as i64 * ej - a[j] as i64 * ei;
            if x % det != 0 || y % det != 0 {
                return None;
            }
            vec![x / det, y / det]
        }
        _ => return None,
    };
    if coeffs.iter().any(|&c| c < 0) {
        return None;
    }
    let fits = (0..n).all(|t| {
        leads
            .iter()
            .zip(&coeffs)
            .map(|(l, &c)| l[t] as i64 * c)
            .sum::<i64>()
            == e[t] as i64
    });
    fits.then(|| coeffs.iter().map(|&c| c as u32).collect())
}

/// Subalgebra membership for one or two generators by peeling leading
/// terms. Under an order where the generators' leading exponents are
/// linearly independent, distinct monomials in the generators have distinct
/// leading monomials, so the leading term of any member is a product of
/// leading terms and a leading term that is not proves non-membership.
/// `None` when no candidate order separates the generators.
fn peel(h: &Polynomial, gens: &[Polynomial], target: &VarSet) -> Option<Option<Polynomial>> {
    if gens.is_empty() || gens.len() > 2 || gens.iter().any(|g| g.is_constant()) {
        return None;
    }
    let n = h.vars().len();
    let lead = |p: &Polynomial, graded: bool, rank: &[usize]| {
        p.terms()
            .max_by_key(|(e, _)| order_key(e, graded, rank))
            .map(|(e, c)| (e.clone(), c.clone()))
    };
    let (graded, rank) = candidate_orders(n).into_iter().find(|(graded, rank)| {
        let leads: Vec<Vec<u32>> = gens.iter().map(|g| lead(g, *graded, rank).unwrap().0).collect();
        match leads.as_slice() {
            [_] => true,
            [a, b] => (0..n).any(|i| (i + 1..n).any(|j| a[i] * b[j] != a[j] * b[i])),
            _ => false,
        }
    })?;
    let heads: Vec<(Vec<u32>, Rational)> = gens.iter().map(|g| lead(g, graded, &rank).unwrap()).collect();
    let leads: Vec<Vec<u32>> = heads.iter().map(|(e, _)| e.clone()).collect();
    let mut powers: Vec<Vec<Polynomial>> = gens.iter().map(|_| vec![Polynomial::one(h.vars())]).collect();
    let mut rest = h.clone();
    let mut found = Vec::new();
    while let Some((e, c)) = lead(&rest, graded, &rank) {
        let Some(ks) = solve_exponents(&e, &leads) else {
            return Some(None);
        };
        let mut prod = Polynomial::one(h.vars());
        let mut lc = Rational::one();
        for (g, &k) in ks.iter().enumerate() {
            while powers[g].len() <= k as usize {
                let next = powers[g].last().unwrap() * &gens[g];
                powers[g].push(next);
            }
            prod = &prod * &powers[g][k as usize];
            lc *= num_traits::pow(heads[g].1.clone(), k as usize);
        }
        let t = c / lc;
        rest = &rest - &prod.scale(&t);
        found.push((ks, t));
    }
    Some(Some(Polynomial::from_terms(target, found)))
}

/// `H` with `H(gens) = h`, solved from values at sample points over the
/// monomials of weighted degree up to `deg h` and then `2 deg h`. A solution
/// is returned only after `H(gens) = h` is checked exactly; `None` leaves
/// the question to the Groebner path.
fn interpolate(h: &Polynomial, gens: &[Polynomial], target: &VarSet) -> Option<Polynomial> {
    let weights: Vec<u32> = gens.iter().map(|g| g.total_degree().unwrap_or(0)).collect();
    if gens.is_empty() || gens.len() > 2 || weights.contains(&0) {
        return None;
    }
    let deg = h.total_degree()?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for bound in [deg, 2 * deg] {
        let monos: Vec<Vec<u32>> = match weights.as_slice() {
            [a] => (0..=bound / a).map(|i| vec![i]).collect(),
            [a, b] => (0..=bound / a)
                .flat_map(|i| (0..=(bound - i * a) / b).map(move |j| vec![i, j]))
                .collect(),
            _ => return None,
        };
        let n = monos.len();
        let mut rows: Vec<Vec<Rational>> = (0..n + 4)
            .map(|_| {
                let pt: Vec<Rational> = (0..h.vars().len())
                    .map(|_| Rational::from_integer(rng.gen_range(-40i64..=40).into()))
                    .collect();
                let vals: Vec<Rational> = gens.iter().map(|g| g.eval(&pt)).collect();
                let mut row: Vec<Rational> = monos
                    .iter()
                    .map(|m| {
                        m.iter()
                            .zip(&vals)
                            .map(|(&k, v)| num_traits::pow(v.clone(), k as usize))
                            .product()
                    })
                    .collect();
                row.push(h.eval(&pt));
                row
            })
            .collect();
        let pivots = rref(&mut rows, n + 1);
        if pivots.len() != n || pivots.contains(&n) {
            continue;
        }
        let found = Polynomial::from_terms(
            target,
            monos.into_iter().zip(rows.iter().map(|r| r[n].clone())),
        );
        if found.compose(gens, h.vars()) == *h {
            return Some(found);
        }
    }
    None
}

/// Membership in `K[gens]` modulo a fixed `q`, with the basis built once.
pub(crate) struct ModularRewriter {
    ideal: SubalgebraIdeal,
    base: VarSet,
    target: VarSet,
}

impl ModularRewriter {
    pub(crate) fn new(gens: &[Polynomial], target: &VarSet, q: &Polynomial) -> Result<Self, PolyError> {
        let base = gens.iter().fold(q.vars().clone(), |acc, g| acc.union(g.vars()));
        let wanted: Vec<&str> = target.names().iter().map(String::as_str).collect();
        let names = tag_names(&base, &wanted);
        let tags: Vec<(&str, Polynomial)> = names
            .iter()
            .map(String::as_str)
            .zip(gens.iter().map(|g| g.embed(&base)))
            .map(|(n, g)| g.map(|g| (n, g)))
            .collect::<Result<_, _>>()?;
        let order = MonomialOrder::grlex(&names.iter().map(String::as_str).collect::<Vec<_>>());
        Ok(ModularRewriter {
            ideal: SubalgebraIdeal::new(Some(&q.embed(&base)?), &tags, &order)?,
            base,
            target: target.clone(),
        })
    }

    /// `H` over the target with `h - H(gens)` in `(q)`.
    pub(crate) fn rewrite(&self, h: &Polynomial) -> Result<Option<Polynomial>, PolyError> {
        let h = h.embed(&self.base.union(h.vars()))?;
        Ok(self.ideal.member(&h)?.map(|p| p.rename(&self.target)))
    }
}

/// `h` as a polynomial in `(F, G)`, if it lies in `K[f, g]`.
pub fn rewrite_in_kernel(h: &Polynomial, kernel: &KernelPair) -> Result<Option<Polynomial>, PolyError> {
    rewrite(h, &[kernel.f.clone(), kernel.g.clone()], &kernel_vars(), None)
}

pub(crate) struct Minimal {
    pub s: Polynomial,
    pub c: Polynomial,
    pub c_tags: Polynomial,
}

/// Divides prime factors out of `X(s)` while `s` is congruent to a kernel
/// element modulo them. `gens` generate the kernel; `target` names them.
pub(crate) fn minimize(
    x: &Derivation,
    s0: &Polynomial,
    gens: &[Polynomial],
    target: &VarSet,
) -> Result<Minimal, SliceError> {
    let vars = x.vars();
    let mut s = s0.embed(vars)?;
    let mut moduli: Vec<(Polynomial, ModularRewriter)> = Vec::new();
    'restart: loop {
        let c = x.apply(&s);
        if c.is_zero() || !x.apply(&c).is_zero() {
            return Err(SliceError::NotLocalSlice(s.to_string()));
        }
        let c_tags = rewrite(&c, gens, target, None)?
            .ok_or_else(|| SliceError::OutsideKernel(c.to_string()))?;
        if !c_tags.is_constant() {
            for q in factor(&c_tags)?.primes() {
                let q_xyz = q.compose(gens, vars);
                // the same prime usually divides several times
                let at = match moduli.iter().position(|(m, _)| *m == q_xyz) {
                    Some(at) => at,
                    None => {
                        moduli.push((q_xyz.clone(), ModularRewriter::new(gens, target, &q_xyz)?));
                        moduli.len() - 1
                    }
                };
                if let Some(h) = moduli[at].1.rewrite(&s)? {
                    let shift = h.compose(gens, vars);
                    s = exact_divide(&(&s - &shift), &q_xyz)?;
                    continue 'restart;
                }
            }
        }
        // constants are kernel elements; only the positive content is
        // removed, so signs survive
        let s = &s - &Polynomial::constant(vars, s.constant_term());
        let content = s.content();
        let s = s.div_scalar(&content);
        return Ok(Minimal {
            c: c.div_scalar(&content),
            c_tags: c_tags.div_scalar(&content),
            s,
        });
    }
}

pub fn minimize_local_slice(
    x: &Derivation,
    s0: &Polynomial,
    kernel: &KernelPair,
) -> Result<PlinthCertificate, SliceError> {
    let m = minimize(x, s0, &[kernel.f.clone(), kernel.g.clone()], &kernel_vars())?;
    Ok(PlinthCertificate {
        s: m.s,
        c_xyz: m.c,
        c_fg: m.c_tags,
        kernel: kernel.clone(),
        squarefree_part: None,
    })
}

/// A minimal local slice starting from the variable chains.
pub fn plinth_generator(
    x: &Derivation,
    kernel: &KernelPair,
    bounds: LndBounds,
) -> Result<PlinthCertificate, SliceError> {
    let s0 = local_slice(x, bounds)?;
    minimize_local_slice(x, &s0, kernel)
}

impl PlinthCertificate {
    /// Every prime factor `q` of `c` fails the congruence test, so no
    /// further division is possible.
    pub fn recertify(&self) -> Result<bool, SliceError> {
        if self.c_fg.is_constant() {
            return Ok(true);
        }
        let gens = [self.kernel.f.clone(), self.kernel.g.clone()];
        let vars = self.s.vars();
        for q in factor(&self.c_fg)?.primes() {
            let q_xyz = q.compose(&gens, vars);
            if rewrite(&self.s, &gens, &kernel_vars(), Some(&q_xyz))?.is_some() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}
