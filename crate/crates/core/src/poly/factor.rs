//! Factorization over the rationals.
//!
//! Univariate: square-free decomposition, factorization modulo a small prime,
//! multifactor Hensel lifting and subset recombination (Zassenhaus).
//! Bivariate: content removal, square-free decomposition in the main
//! variable, then lifting the factorization of a lucky specialization
//! `Y = a` back through `Q[X][[Y]]`.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::zp::{is_prime, Zp, ZpPoly};
use super::{
    content_in, exact_divide, gcd, grlex_cmp, primitive_in, PolyError, Polynomial, Rational,
    UniPoly, VarSet,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub unit: Rational,
    /// Irreducible, primitive, normalized factors with multiplicities,
    /// sorted by leading monomial.
    pub factors: Vec<(Polynomial, u32)>,
}

impl Factorization {
    /// `unit * prod f^m` over `vars`.
    pub fn expand(&self, vars: &VarSet) -> Polynomial {
        self.factors.iter().fold(
            Polynomial::constant(vars, self.unit.clone()),
            |acc, (f, m)| &acc * &f.embed(vars).expect("factor fits").pow(*m),
        )
    }

    pub fn is_irreducible(&self) -> bool {
        self.factors.len() == 1 && self.factors[0].1 == 1
    }

    /// Distinct irreducible factors, dropping multiplicities.
    pub fn primes(&self) -> impl Iterator<Item = &Polynomial> {
        self.factors.iter().map(|(f, _)| f)
    }
}

/// Total order used to list factors: descending terms compared pairwise.
pub(crate) fn factor_order(a: &Polynomial, b: &Polynomial) -> Ordering {
    let mut ta: Vec<_> = a.terms().collect();
    let mut tb: Vec<_> = b.terms().collect();
    ta.sort_by(|x, y| grlex_cmp(y.0, x.0));
    tb.sort_by(|x, y| grlex_cmp(y.0, x.0));
    for (x, y) in ta.iter().zip(&tb) {
        let o = grlex_cmp(x.0, y.0).then_with(|| x.1.cmp(y.1));
        if o != Ordering::Equal {
            return o;
        }
    }
    ta.len().cmp(&tb.len())
}

fn finish(input: &Polynomial, raw: Vec<(Polynomial, u32)>) -> Factorization {
    let mut merged: Vec<(Polynomial, u32)> = Vec::new();
    for (f, m) in raw {
        let f = f.normalized();
        if f.is_constant() {
            continue;
        }
        match merged.iter_mut().find(|(g, _)| *g == f) {
            Some(e) => e.1 += m,
            None => merged.push((f, m)),
        }
    }
    merged.sort_by(|a, b| factor_order(&a.0, &b.0));
    let lc = merged.iter().fold(Rational::one(), |acc, (f, m)| {
        acc * f.leading_coeff().pow(*m as i32)
    });
    Factorization {
        unit: input.leading_coeff() / lc,
        factors: merged,
    }
}

/// Complete factorization of a polynomial in at most two variables.
pub fn factor(p: &Polynomial) -> Result<Factorization, PolyError> {
    match p.support().len() {
        0 | 1 => factor_univariate(p),
        2 => factor_bivariate(p),
        n => Err(PolyError::Unsupported(format!(
            "factorization in {n} variables"
        ))),
    }
}

pub fn factor_univariate(p: &Polynomial) -> Result<Factorization, PolyError> {
    if p.is_zero() {
        return Err(PolyError::ZeroInput);
    }
    let supp = p.support();
    if supp.len() > 1 {
        return Err(PolyError::Unsupported("not univariate".into()));
    }
    let Some(&v) = supp.first() else {
        return Ok(finish(p, Vec::new()));
    };
    let u = UniPoly::from_polynomial(p, v).expect("univariate");
    let mut raw = Vec::new();
    for (m, a) in u.squarefree_decomposition() {
        for f in factor_integer_squarefree(&a.primitive_integer()) {
            raw.push((UniPoly::from_bigints(&f).to_polynomial(p.vars(), v), m));
        }
    }
    Ok(finish(p, raw))
}

/// Product of the distinct irreducible factors, normalized; 1 for constants.
pub fn squarefree_part(p: &Polynomial) -> Result<Polynomial, PolyError> {
    if p.is_zero() {
        return Err(PolyError::ZeroInput);
    }
    let mut g = p.clone();
    for v in p.support() {
        g = gcd(&g, &p.derivative(v))?;
    }
    Ok(exact_divide(p, &g)?.normalized())
}

pub fn factor_bivariate(p: &Polynomial) -> Result<Factorization, PolyError> {
    if p.is_zero() {
        return Err(PolyError::ZeroInput);
    }
    let supp = p.support();
    match supp.len() {
        0 | 1 => return factor_univariate(p),
        2 => {}
        _ => return Err(PolyError::Unsupported("more than two variables".into())),
    }
    let (x, y) = if p.degree_in(supp[1]) < p.degree_in(supp[0]) {
        (supp[1], supp[0])
    } else {
        (supp[0], supp[1])
    };
    let mut raw = Vec::new();
    let cont = content_in(p, x);
    if !cont.is_constant() {
        raw.extend(factor_univariate(&cont)?.factors);
    }
    let pp = exact_divide(p, &cont)?;
    for (m, q) in squarefree_decomposition_in(&pp, x)? {
        for f in factor_squarefree_bivariate(&q, x, y)? {
            raw.push((f, m));
        }
    }
    Ok(finish(p, raw))
}

/// Yun's algorithm in variable `x` for `f` primitive with respect to `x`.
fn squarefree_decomposition_in(
    f: &Polynomial,
    x: usize,
) -> Result<Vec<(u32, Polynomial)>, PolyError> {
    let mut out = Vec::new();
    if f.degree_in(x) == 0 {
        return Ok(out);
    }
    let df = f.derivative(x);
    let a0 = gcd(f, &df)?;
    let mut b = exact_divide(f, &a0)?;
    let mut d = exact_divide(&df, &a0)? - b.derivative(x);
    let mut i = 1;
    while b.degree_in(x) > 0 {
        let a = if d.is_zero() { b.normalized() } else { gcd(&b, &d)? };
        b = exact_divide(&b, &a)?;
        let c = exact_divide(&d, &a)?;
        d = c - b.derivative(x);
        if a.degree_in(x) > 0 {
            out.push((i, a));
        }
        i += 1;
    }
    Ok(out)
}

/// Lucky specialization points 0, 1, -1, 2, -2, ...
fn lucky_points() -> impl Iterator<Item = i64> {
    (0..).map(|k: i64| if k % 2 == 1 { (k + 1) / 2 } else { -k / 2 })
}

fn factor_squarefree_bivariate(
    q: &Polynomial,
    x: usize,
    y: usize,
) -> Result<Vec<Polynomial>, PolyError> {
    let vars = q.vars().clone();
    let n = q.degree_in(x);
    if !q.involves(y) {
        return Ok(factor_univariate(q)?.factors.into_iter().map(|(f, _)| f).collect());
    }
    if n <= 1 {
        return Ok(vec![q.clone()]);
    }
    let shift = |p: &Polynomial, a: i64| -> Polynomial {
        let images: Vec<Polynomial> = (0..vars.len())
            .map(|i| {
                let v = Polynomial::var_at(&vars, i);
                if i == y {
                    &v + &Polynomial::from_int(&vars, a)
                } else {
                    v
                }
            })
            .collect();
        p.compose(&images, &vars)
    };
    let lc_x = |p: &Polynomial| p.coefficients_in(x).pop().expect("nonzero");

    let (a, qs) = lucky_points()
        .take(400)
        .find_map(|a| {
            let qs = shift(q, a);
            let at0 = series_coeffs(&qs, x, y).swap_remove(0);
            let ok = at0.degree() == n as usize && at0.gcd(&at0.derivative()).is_one();
            ok.then_some((a, qs))
        })
        .ok_or_else(|| PolyError::Unsupported("no lucky specialization found".into()))?;

    let qc = series_coeffs(&qs, x, y);
    let uni: Vec<UniPoly> = factor_integer_squarefree(&qc[0].primitive_integer())
        .iter()
        .map(|f| UniPoly::from_bigints(f).monic())
        .collect();
    if uni.len() == 1 {
        return Ok(vec![q.clone()]);
    }

    let b = lc_x(&qs);
    let bu = UniPoly::from_polynomial(&b, y).expect("leading coefficient in y only");
    let order = (qs.degree_in(y) + b.degree_in(y) + 1) as usize;
    let lifted = hensel_series(&qc, &bu, &uni, order);

    // Recombine: b * prod G_S truncated is an associate of a true factor.
    let mut remaining: Vec<Vec<UniPoly>> = lifted;
    let mut cur = qs.clone();
    let mut found = Vec::new();
    let bser: Vec<UniPoly> = (0..order).map(|k| UniPoly::constant(bu.coeff(k))).collect();
    let mut size = 1;
    while 2 * size <= remaining.len() {
        let mut hit = None;
        for subset in combinations(remaining.len(), size) {
            let prod = subset
                .iter()
                .fold(bser.clone(), |acc, &i| series_mul(&acc, &remaining[i], order));
            let cand = from_series(&prod, &vars, x, y);
            if cand.degree_in(x) == 0 || cand.degree_in(y) > cur.degree_in(y) {
                continue;
            }
            let cand = primitive_in(&cand, x);
            if let Ok(rest) = exact_divide(&cur, &cand) {
                hit = Some((subset, cand, rest));
                break;
            }
        }
        match hit {
            Some((subset, cand, rest)) => {
                found.push(cand);
                cur = rest;
                for &i in subset.iter().rev() {
                    remaining.remove(i);
                }
            }
            None => size += 1,
        }
    }
    if cur.degree_in(x) > 0 {
        found.push(cur);
    }
    Ok(found.iter().map(|f| shift(f, -a)).collect())
}

/// Coefficients of powers of `y`, each a univariate polynomial in `x`.
fn series_coeffs(p: &Polynomial, x: usize, y: usize) -> Vec<UniPoly> {
    p.coefficients_in(y)
        .iter()
        .map(|c| UniPoly::from_polynomial(c, x).expect("bivariate"))
        .collect()
}

fn from_series(s: &[UniPoly], vars: &VarSet, x: usize, y: usize) -> Polynomial {
    let coeffs: Vec<Polynomial> = s.iter().map(|c| c.to_polynomial(vars, x)).collect();
    Polynomial::from_coefficients_in(vars, y, &coeffs)
}

fn series_mul(a: &[UniPoly], b: &[UniPoly], order: usize) -> Vec<UniPoly> {
    let mut out = vec![UniPoly::zero(); order];
    for (i, ai) in a.iter().enumerate().take(order) {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(order - i) {
            out[i + j] = &out[i + j] + &(ai * bj);
        }
    }
    out
}

/// Lifts monic `factors` of `q(x,0)/b(0)` to monic factors of `q/b` modulo
/// `y^order`, returned as truncated series.
fn hensel_series(
    q: &[UniPoly],
    b: &UniPoly,
    factors: &[UniPoly],
    order: usize,
) -> Vec<Vec<UniPoly>> {
    let b0 = b.coeff(0);
    let mut binv = vec![b0.recip()];
    for k in 1..order {
        let mut acc = Rational::zero();
        for j in 1..=k {
            acc += b.coeff(j) * &binv[k - j];
        }
        binv.push(-acc / &b0);
    }
    let target: Vec<UniPoly> = (0..order)
        .map(|k| {
            (0..=k.min(q.len().saturating_sub(1)))
                .fold(UniPoly::zero(), |acc, j| &acc + &q[j].scale(&binv[k - j]))
        })
        .collect();

    let r = factors.len();
    let bezout: Vec<UniPoly> = (0..r)
        .map(|i| {
            let others = (0..r)
                .filter(|&j| j != i)
                .fold(UniPoly::one(), |acc, j| &acc * &factors[j]);
            others.inverse_mod(&factors[i]).expect("coprime modular factors")
        })
        .collect();

    let mut lifted: Vec<Vec<UniPoly>> = factors
        .iter()
        .map(|f| {
            let mut s = vec![UniPoly::zero(); order];
            s[0] = f.clone();
            s
        })
        .collect();
    for k in 1..order {
        let prod = lifted
            .iter()
            .skip(1)
            .fold(lifted[0].clone(), |acc, g| series_mul(&acc, g, k + 1));
        let err = &target[k] - &prod[k];
        if err.is_zero() {
            continue;
        }
        for i in 0..r {
            lifted[i][k] = (&bezout[i] * &err).rem(&factors[i]);
        }
    }
    lifted
}

/// Index subsets of `0..n` of the given size, in lexicographic order.
fn combinations(n: usize, size: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < size - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, size, &mut Vec::new(), &mut out);
    out
}

fn trim(mut a: Vec<BigInt>) -> Vec<BigInt> {
    while a.last().is_some_and(|c| c.is_zero()) {
        a.pop();
    }
    a
}

fn mul_mod(a: &[BigInt], b: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out.into_iter().map(|c| c.mod_floor(m)).collect())
}

fn primitive(mut a: Vec<BigInt>) -> Vec<BigInt> {
    let g = a.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    let neg = a.last().is_some_and(|c| c.is_negative());
    if !g.is_zero() {
        for c in &mut a {
            *c /= &g;
            if neg {
                *c = -&*c;
            }
        }
    }
    a
}

/// Exact quotient `a / b` over the integers.
fn int_divide(a: &[BigInt], b: &[BigInt]) -> Option<Vec<BigInt>> {
    if a.len() < b.len() {
        return None;
    }
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lb = &b[db];
    let mut q = vec![BigInt::zero(); a.len() - db];
    for k in (0..q.len()).rev() {
        let (c, rem) = r[k + db].div_rem(lb);
        if !rem.is_zero() {
            return None;
        }
        if c.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            r[k + j] -= &c * bj;
        }
        q[k] = c;
    }
    r.iter().all(|c| c.is_zero()).then_some(q)
}

/// Irreducible factors over the integers of a primitive square-free
/// polynomial with coefficients listed low-to-high.
pub fn factor_integer_squarefree(f: &[BigInt]) -> Vec<Vec<BigInt>> {
    let f = primitive(trim(f.to_vec()));
    if f.len() <= 2 {
        return vec![f];
    }
    if f[0].is_zero() {
        let mut out = vec![vec![BigInt::zero(), BigInt::one()]];
        out.extend(factor_integer_squarefree(&f[1..]));
        return out;
    }
    let n = f.len() - 1;
    let lc = f[n].clone();

    let mut rng = ChaCha8Rng::seed_from_u64(0x6c6e_6400);
    let mut best: Option<(Zp, Vec<ZpPoly>)> = None;
    let mut good = 0;
    let mut p = 2u64;
    while good < 5 {
        p += 1;
        if !is_prime(p) {
            continue;
        }
        let zp = Zp::new(p);
        if zp.reduce_big(&lc) == 0 {
            continue;
        }
        let fp = zp.from_ints(&f);
        if !zp.is_squarefree(&fp) {
            continue;
        }
        good += 1;
        let facs = zp.factor_squarefree(&zp.monic(&fp), &mut rng);
        let better = best.as_ref().is_none_or(|(_, b)| facs.len() < b.len());
        let done = facs.len() == 1;
        if better {
            best = Some((zp, facs));
        }
        if done {
            break;
        }
    }
    let (zp, facs) = best.expect("some prime is good");
    if facs.len() == 1 {
        return vec![f];
    }

    // Any factor times lc has coefficients below |lc| 2^n ||f||_2.
    let norm = f.iter().fold(BigInt::zero(), |acc, c| acc + c * c).sqrt() + 1;
    let bound = lc.abs() * (BigInt::one() << n) * norm;
    let pb = BigInt::from(zp.p);
    let mut m = pb.clone();
    let mut k = 1;
    while m <= &bound * 2 {
        m *= &pb;
        k += 1;
    }
    let lifted = hensel_integer(&f, zp, &facs, k);

    let mut remaining = lifted;
    let mut cur = f.clone();
    let mut out = Vec::new();
    let half = &m >> 1;
    let mut size = 1;
    while 2 * size <= remaining.len() {
        let mut hit = None;
        for subset in combinations(remaining.len(), size) {
            let lcc = cur.last().unwrap().mod_floor(&m);
            let prod = subset
                .iter()
                .fold(vec![lcc], |acc, &i| mul_mod(&acc, &remaining[i], &m));
            let sym: Vec<BigInt> = prod
                .into_iter()
                .map(|c| if c > half { c - &m } else { c })
                .collect();
            let cand = primitive(trim(sym));
            if cand.len() < 2 {
                continue;
            }
            if !cur[0].is_zero() && !cur[0].is_multiple_of(&cand[0]) {
                continue;
            }
            if let Some(q) = int_divide(&cur, &cand) {
                hit = Some((subset, cand, q));
                break;
            }
        }
        match hit {
            Some((subset, cand, q)) => {
                out.push(cand);
                cur = q;
                for &i in subset.iter().rev() {
                    remaining.remove(i);
                }
            }
            None => size += 1,
        }
    }
    if cur.len() > 1 {
        out.push(primitive(cur));
    }
    out
}

/// Multifactor linear Hensel lifting of monic modular factors of `f / lc`
/// to modulus `p^k`.
fn hensel_integer(f: &[BigInt], zp: Zp, facs: &[ZpPoly], k: u32) -> Vec<Vec<BigInt>> {
    let p = BigInt::from(zp.p);
    let m = p.pow(k);
    let lc = f.last().unwrap().mod_floor(&m);
    let lc_inv = {
        let e = lc.extended_gcd(&m);
        debug_assert!(e.gcd.is_one());
        e.x.mod_floor(&m)
    };
    let target: Vec<BigInt> = f.iter().map(|c| (c * &lc_inv).mod_floor(&m)).collect();

    let r = facs.len();
    let bezout: Vec<ZpPoly> = (0..r)
        .map(|i| {
            let others = (0..r)
                .filter(|&j| j != i)
                .fold(vec![1u64], |acc, j| zp.mul_poly(&acc, &facs[j]));
            zp.inverse_mod(&others, &facs[i])
        })
        .collect();

    let mut lifted: Vec<Vec<BigInt>> = facs
        .iter()
        .map(|g| g.iter().map(|&c| BigInt::from(c)).collect())
        .collect();
    let mut pk = p.clone();
    for _ in 1..k {
        let next = &pk * &p;
        let prod = lifted
            .iter()
            .skip(1)
            .fold(lifted[0].clone(), |acc, g| mul_mod(&acc, g, &next));
        let n = target.len().max(prod.len());
        let err: Vec<BigInt> = (0..n)
            .map(|i| {
                let t = target.get(i).cloned().unwrap_or_default();
                let q = prod.get(i).cloned().unwrap_or_default();
                let d = (t - q).mod_floor(&next);
                debug_assert!(d.is_multiple_of(&pk));
                d / &pk
            })
            .collect();
        let ebar = zp.from_ints(&err);
        if !ebar.is_empty() {
            for i in 0..r {
                let delta = zp.rem(&zp.mul_poly(&bezout[i], &ebar), &facs[i]);
                for (j, &c) in delta.iter().enumerate() {
                    lifted[i][j] += &pk * BigInt::from(c);
                }
            }
        }
        pk = next;
    }
    lifted
}
