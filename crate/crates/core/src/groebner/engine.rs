//! Buchberger's algorithm over the integers with content removal.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::order::{divides, mul, quotient, Key, Layout};
use crate::poly::{Polynomial, Rational, VarSet};

/// Terms in descending order, primitive integer coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct IPoly {
    pub terms: Vec<(Key, BigInt)>,
}

impl IPoly {
    pub fn lead(&self) -> &Key {
        &self.terms[0].0
    }

    pub fn lc(&self) -> &BigInt {
        &self.terms[0].1
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Scales to integer coefficients, removes content, makes the leading
    /// coefficient positive.
    pub fn from_polynomial(p: &Polynomial, layout: &Layout) -> IPoly {
        let den = p
            .terms()
            .fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()));
        let mut terms: Vec<(Key, BigInt)> = p
            .terms()
            .map(|(e, c)| {
                (
                    layout.key(e),
                    (c * Rational::from_integer(den.clone())).to_integer(),
                )
            })
            .collect();
        terms.sort_by(|a, b| b.0.cmp(&a.0));
        let mut out = IPoly { terms };
        out.make_primitive();
        out
    }

    pub fn to_polynomial(&self, vars: &VarSet, layout: &Layout, monic: bool) -> Polynomial {
        let lc = if monic && !self.is_zero() {
            Rational::from_integer(self.lc().clone())
        } else {
            Rational::one()
        };
        Polynomial::from_terms(
            vars,
            self.terms
                .iter()
                .map(|(k, c)| (layout.exponents(k), Rational::from_integer(c.clone()) / &lc)),
        )
    }

    pub fn make_primitive(&mut self) {
        let g = content(self.terms.iter().map(|(_, c)| c));
        if g.is_zero() {
            return;
        }
        let neg = self.terms[0].1.is_negative();
        for (_, c) in &mut self.terms {
            *c /= &g;
            if neg {
                *c = -&*c;
            }
        }
    }
}

fn content<'a>(cs: impl Iterator<Item = &'a BigInt>) -> BigInt {
    let mut g = BigInt::zero();
    for c in cs {
        g = g.gcd(c);
        if g.is_one() {
            break;
        }
    }
    g
}

/// Reduces `p` modulo `basis`. Returns `(r, lambda)` with
/// `lambda * p - r` in the ideal and no term of `r` divisible by a leading
/// term of the basis (only the leading term when `full` is false).
pub(crate) fn reduce(p: &IPoly, basis: &[&IPoly], full: bool) -> (IPoly, Rational) {
    let mut rest: BTreeMap<Key, BigInt> = p.terms.iter().cloned().collect();
    let mut done: Vec<(Key, BigInt)> = Vec::new();
    let mut lambda = Rational::one();
    let mut steps = 0u32;
    while let Some((m, c)) = rest.pop_last() {
        let Some(g) = basis.iter().find(|g| divides(g.lead(), &m)) else {
            done.push((m, c));
            if !full {
                done.extend(std::mem::take(&mut rest).into_iter().rev());
                break;
            }
            continue;
        };
        let a = g.lc();
        let d = a.gcd(&c);
        let fa = a / &d;
        let fc = &c / &d;
        if !fa.is_one() {
            for v in rest.values_mut() {
                *v *= &fa;
            }
            for (_, v) in done.iter_mut() {
                *v *= &fa;
            }
            lambda *= Rational::from_integer(fa.clone());
        }
        let q = quotient(&m, g.lead());
        for (gm, gc) in g.terms.iter().skip(1) {
            let key = mul(gm, &q);
            let delta = &fc * gc;
            match rest.get_mut(&key) {
                Some(v) => {
                    *v -= delta;
                    if v.is_zero() {
                        rest.remove(&key);
                    }
                }
                None => {
                    rest.insert(key, -delta);
                }
            }
        }
        steps += 1;
        if steps % 8 == 0 {
            let g = content(done.iter().map(|(_, c)| c).chain(rest.values()));
            if !g.is_zero() && !g.is_one() {
                for v in rest.values_mut() {
                    *v /= &g;
                }
                for (_, v) in done.iter_mut() {
                    *v /= &g;
                }
                lambda /= Rational::from_integer(g);
            }
        }
    }
    let g = content(done.iter().map(|(_, c)| c));
    if !g.is_zero() && !g.is_one() {
        for (_, v) in done.iter_mut() {
            *v /= &g;
        }
        lambda /= Rational::from_integer(g);
    }
    (IPoly { terms: done }, lambda)
}

fn spoly(f: &IPoly, g: &IPoly, layout: &Layout) -> IPoly {
    let l = layout.lcm(f.lead(), g.lead());
    let mf = quotient(&l, f.lead());
    let mg = quotient(&l, g.lead());
    let d = f.lc().gcd(g.lc());
    let cf = g.lc() / &d;
    let cg = f.lc() / &d;
    let mut acc: BTreeMap<Key, BigInt> = BTreeMap::new();
    for (m, c) in f.terms.iter().skip(1) {
        *acc.entry(mul(m, &mf)).or_default() += &cf * c;
    }
    for (m, c) in g.terms.iter().skip(1) {
        *acc.entry(mul(m, &mg)).or_default() -= &cg * c;
    }
    let mut out = IPoly {
        terms: acc
            .into_iter()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .collect(),
    };
    out.make_primitive();
    out
}

struct Pair {
    i: usize,
    j: usize,
    lcm: Key,
    degree: u32,
}

/// Gebauer-Moller update of the pair list and basis with new element `h`.
fn update(
    store: &[IPoly],
    basis: &mut Vec<usize>,
    pairs: &mut Vec<Pair>,
    h: usize,
    layout: &Layout,
) {
    let lh = store[h].lead().clone();
    let mut cand: Vec<(usize, Key)> = basis
        .iter()
        .map(|&g| (g, layout.lcm(&lh, store[g].lead())))
        .collect();
    cand.reverse();
    let mut kept: Vec<(usize, Key)> = Vec::new();
    while let Some((g, l)) = cand.pop() {
        let coprime = layout.coprime(&lh, store[g].lead());
        let dominated = cand.iter().chain(kept.iter()).any(|(_, l2)| divides(l2, &l));
        if coprime || !dominated {
            kept.push((g, l));
        }
    }
    let new_pairs: Vec<Pair> = kept
        .into_iter()
        .filter(|(g, _)| !layout.coprime(&lh, store[*g].lead()))
        .map(|(g, l)| Pair {
            i: g,
            j: h,
            degree: layout.total_degree(&l),
            lcm: l,
        })
        .collect();

    pairs.retain(|p| {
        !(divides(&lh, &p.lcm)
            && layout.lcm(store[p.i].lead(), &lh) != p.lcm
            && layout.lcm(store[p.j].lead(), &lh) != p.lcm)
    });
    pairs.extend(new_pairs);
    basis.retain(|&g| !divides(&lh, store[g].lead()));
    basis.push(h);
}

/// Reduced Groebner basis, sorted by leading monomial ascending, each element
/// primitive with positive leading coefficient.
pub(crate) fn groebner(gens: Vec<IPoly>, layout: &Layout) -> Vec<IPoly> {
    let mut store: Vec<IPoly> = Vec::new();
    let mut basis: Vec<usize> = Vec::new();
    let mut pairs: Vec<Pair> = Vec::new();

    let mut gens: Vec<IPoly> = gens.into_iter().filter(|g| !g.is_zero()).collect();
    gens.sort_by(|a, b| a.lead().cmp(b.lead()));
    for g in gens {
        let current: Vec<&IPoly> = basis.iter().map(|&i| &store[i]).collect();
        let (mut r, _) = reduce(&g, &current, true);
        if r.is_zero() {
            continue;
        }
        r.make_primitive();
        store.push(r);
        let h = store.len() - 1;
        update(&store, &mut basis, &mut pairs, h, layout);
    }

    while !pairs.is_empty() {
        let best = (0..pairs.len())
            .min_by(|&a, &b| {
                let (p, q) = (&pairs[a], &pairs[b]);
                p.degree
                    .cmp(&q.degree)
                    .then_with(|| p.lcm.cmp(&q.lcm))
                    .then_with(|| (p.i, p.j).cmp(&(q.i, q.j)))
            })
            .unwrap();
        let pair = pairs.swap_remove(best);
        let s = spoly(&store[pair.i], &store[pair.j], layout);
        let current: Vec<&IPoly> = basis.iter().map(|&i| &store[i]).collect();
        let (mut r, _) = reduce(&s, &current, true);
        if r.is_zero() {
            continue;
        }
        r.make_primitive();
        store.push(r);
        let h = store.len() - 1;
        update(&store, &mut basis, &mut pairs, h, layout);
    }

    // Minimal basis, then inter-reduce.
    let mut minimal: Vec<IPoly> = basis.iter().map(|&i| store[i].clone()).collect();
    minimal.sort_by(|a, b| a.lead().cmp(b.lead()));
    let mut keep: Vec<IPoly> = Vec::new();
    for g in minimal {
        if !keep.iter().any(|k| divides(k.lead(), g.lead())) {
            keep.retain(|k| !divides(g.lead(), k.lead()));
            keep.push(g);
        }
    }
    let mut reduced = Vec::with_capacity(keep.len());
    for i in 0..keep.len() {
        let others: Vec<&IPoly> = keep
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, g)| g)
            .collect();
        let (mut r, _) = reduce(&keep[i], &others, true);
        r.make_primitive();
        reduced.push(r);
    }
    reduced.sort_by(|a, b| a.lead().cmp(b.lead()));
    reduced
}
