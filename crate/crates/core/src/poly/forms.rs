//! Roots of homogeneous forms.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::{grlex_cmp, Polynomial, Rational};

fn int_root(n: &BigInt, k: u32) -> Option<BigInt> {
    if n.is_negative() {
        if k % 2 == 0 {
            return None;
        }
        return int_root(&-n, k).map(|r| -r);
    }
    let r = n.nth_root(k);
    (r.pow(k) == *n).then_some(r)
}

/// Exact `k`-th root of a rational, if it exists.
pub fn rational_root(c: &Rational, k: u32) -> Option<Rational> {
    Some(Rational::new(
        int_root(c.numer(), k)?,
        int_root(c.denom(), k)?,
    ))
}

/// A polynomial `r` with `r^k == form`, built term by term from the leading
/// term down. For even `k` the root with positive leading coefficient is
/// returned; a form with negative leading coefficient has none.
pub fn form_kth_root(form: &Polynomial, k: u32) -> Option<Polynomial> {
    assert!(k >= 1);
    if k == 1 || form.is_zero() {
        return Some(form.clone());
    }
    let vars = form.vars().clone();
    let (e0, c0) = form.leading_term()?;
    if e0.iter().any(|x| x % k != 0) {
        return None;
    }
    let t0e: Vec<u32> = e0.iter().map(|x| x / k).collect();
    let t0 = Polynomial::monomial(&vars, t0e.clone(), rational_root(c0, k)?);
    // k * t0^(k-1), the divisor for each correction term
    let denom_c = t0.leading_coeff().pow(k as i32 - 1) * Rational::from_integer(k.into());
    let denom_e: Vec<u32> = t0e.iter().map(|x| x * (k - 1)).collect();

    let mut root = t0;
    let mut last = t0e;
    loop {
        let err = form - &root.pow(k);
        let Some((e, c)) = err.leading_term() else {
            return Some(root);
        };
        if e.iter().zip(&denom_e).any(|(a, b)| a < b) {
            return None;
        }
        let te: Vec<u32> = e.iter().zip(&denom_e).map(|(a, b)| a - b).collect();
        if grlex_cmp(&te, &last) != std::cmp::Ordering::Less || c.is_zero() {
            return None;
        }
        root = &root + &Polynomial::monomial(&vars, te.clone(), c / &denom_c);
        last = te;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse, VarSet};

    fn p(s: &str) -> Polynomial {
        parse(s, &VarSet::of(&["F", "G"])).unwrap()
    }

    #[test]
    fn square_roots() {
        assert_eq!(form_kth_root(&p("F^2+2*F*G+G^2"), 2), Some(p("F+G")));
        assert_eq!(form_kth_root(&p("F*G"), 2), None);
        assert_eq!(form_kth_root(&p("-F^2"), 2), None);
        assert_eq!(form_kth_root(&p("-8*F^3"), 3), Some(p("-2*F")));
        assert_eq!(form_kth_root(&p("4/9*(F-3*G)^4"), 4), None);
        assert_eq!(form_kth_root(&p("16/81*(F-3*G)^4"), 4), Some(p("2/3*F-2*G")));
    }
}
