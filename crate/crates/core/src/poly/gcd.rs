//! Exact division and multivariate gcd (primitive PRS, recursive on variables).

use num_integer::Integer;
use num_traits::Zero;

use super::{PolyError, Polynomial, Rational};

/// Quotient `q` with `q * b == a`.
pub fn exact_divide(a: &Polynomial, b: &Polynomial) -> Result<Polynomial, PolyError> {
    if b.is_zero() {
        return Err(PolyError::DivisionByZero);
    }
    let (a, b) = match (a.embed(b.vars()), b.embed(a.vars())) {
        (Ok(a2), _) => (a2, b.clone()),
        (_, Ok(b2)) => (a.clone(), b2),
        _ => return Err(PolyError::NotDivisible),
    };
    let vars = a.vars().clone();
    // Lex division by a single divisor never stalls when the division is exact.
    let (lb, lc) = b
        .terms()
        .next_back()
        .map(|(e, c)| (e.clone(), c.clone()))
        .unwrap();
    let mut rem = a;
    let mut quot = Polynomial::zero(&vars);
    loop {
        let Some((e, c)) = rem.terms().next_back().map(|(e, c)| (e.clone(), c.clone())) else {
            break;
        };
        if e.iter().zip(&lb).any(|(x, y)| x < y) {
            return Err(PolyError::NotDivisible);
        }
        let qe: Vec<u32> = e.iter().zip(&lb).map(|(x, y)| x - y).collect();
        let qc = c / &lc;
        let t = Polynomial::monomial(&vars, qe, qc);
        rem = &rem - &(&t * &b);
        quot = &quot + &t;
    }
    Ok(quot)
}

/// `true` when `b` divides `a` exactly.
pub fn divides(b: &Polynomial, a: &Polynomial) -> bool {
    exact_divide(a, b).is_ok()
}

/// Normalized gcd: primitive integer coefficients, positive graded-lex
/// leading coefficient. Constant common factors are stripped, so the gcd of
/// two nonzero constants is 1.
pub fn gcd(a: &Polynomial, b: &Polynomial) -> Result<Polynomial, PolyError> {
    if a.is_zero() && b.is_zero() {
        return Err(PolyError::ZeroGcd);
    }
    let (a, b) = if a.vars() == b.vars() {
        (a.clone(), b.clone())
    } else {
        let vars = a.vars().union(b.vars());
        (a.embed(&vars)?, b.embed(&vars)?)
    };
    Ok(gcd_rec(&a, &b))
}

/// Like [`gcd`] but keeps the rational gcd of the two contents.
pub fn gcd_with_content(a: &Polynomial, b: &Polynomial) -> Result<Polynomial, PolyError> {
    let g = gcd(a, b)?;
    let (ca, cb) = (a.content(), b.content());
    let c = if ca.is_zero() {
        cb
    } else if cb.is_zero() {
        ca
    } else {
        Rational::new(ca.numer().gcd(cb.numer()), ca.denom().lcm(cb.denom()))
    };
    Ok(g.scale(&c))
}

/// gcd of a list of polynomials (zeros ignored); `None` if all are zero.
pub fn gcd_many<'a, I>(items: I) -> Option<Polynomial>
where
    I: IntoIterator<Item = &'a Polynomial>,
{
    let mut acc: Option<Polynomial> = None;
    for p in items {
        if p.is_zero() {
            continue;
        }
        acc = Some(match acc {
            None => p.normalized(),
            Some(g) => {
                if g.is_constant() {
                    return Some(g);
                }
                gcd(&g, p).expect("nonzero input")
            }
        });
    }
    acc
}

fn gcd_rec(a: &Polynomial, b: &Polynomial) -> Polynomial {
    if a.is_zero() {
        return b.normalized();
    }
    if b.is_zero() {
        return a.normalized();
    }
    if a.is_constant() || b.is_constant() {
        return Polynomial::one(a.vars());
    }
    let sa = a.support();
    let sb = b.support();
    let v = *sa.iter().chain(&sb).max().unwrap();

    let ca = content_in(a, v);
    let cb = content_in(b, v);
    let gc = gcd_rec(&ca, &cb);
    let pa = exact_divide(a, &ca).expect("content divides");
    let pb = exact_divide(b, &cb).expect("content divides");
    if pa.degree_in(v) == 0 || pb.degree_in(v) == 0 {
        return gc;
    }
    let (mut r0, mut r1) = if pa.degree_in(v) >= pb.degree_in(v) {
        (pa, pb)
    } else {
        (pb, pa)
    };
    let gp = loop {
        let r = pseudo_remainder(&r0, &r1, v);
        if r.is_zero() {
            break r1;
        }
        if r.degree_in(v) == 0 {
            break Polynomial::one(a.vars());
        }
        r0 = r1;
        r1 = primitive_in(&r, v);
    };
    let gp = primitive_in(&gp, v);
    (&gc * &gp).normalized()
}

/// gcd of the coefficients of `p` viewed as a polynomial in variable `v`.
pub fn content_in(p: &Polynomial, v: usize) -> Polynomial {
    let coeffs = p.coefficients_in(v);
    let mut acc = Polynomial::zero(p.vars());
    for c in coeffs.iter().filter(|c| !c.is_zero()) {
        acc = gcd_rec(&acc, c);
        if acc.is_constant() {
            break;
        }
    }
    acc
}

/// Primitive part with respect to variable `v`, normalized.
pub fn primitive_in(p: &Polynomial, v: usize) -> Polynomial {
    if p.is_zero() {
        return p.clone();
    }
    let c = content_in(p, v);
    exact_divide(p, &c).expect("content divides").normalized()
}

/// Pseudo-remainder of `a` by `b` with respect to variable `v`.
pub fn pseudo_remainder(a: &Polynomial, b: &Polynomial, v: usize) -> Polynomial {
    let vars = a.vars();
    let bc = b.coefficients_in(v);
    let db = bc.len() - 1;
    let lb = &bc[db];
    let mut r = a.coefficients_in(v);
    while r.len() > db && !r.is_empty() {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        for c in r.iter_mut() {
            *c = &*c * lb;
        }
        for (j, bj) in bc.iter().enumerate() {
            let k = dr - db + j;
            r[k] = &r[k] - &(&lr * bj);
        }
        while r.last().is_some_and(|c| c.is_zero()) {
            r.pop();
        }
        // Keep coefficient growth in check; the scalar does not matter.
        if r.len() > 1 {
            let all = Polynomial::from_coefficients_in(vars, v, &r);
            let cont = all.content();
            if !cont.is_zero() {
                let inv = cont.recip();
                for c in r.iter_mut() {
                    *c = c.scale(&inv);
                }
            }
        }
    }
    Polynomial::from_coefficients_in(vars, v, &r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse, VarSet};

    fn p(s: &str) -> Polynomial {
        parse(s, &VarSet::of(&["x", "y", "z"])).unwrap()
    }

    #[test]
    fn division_examples() {
        assert_eq!(exact_divide(&p("x^2*y"), &p("x")).unwrap(), p("x*y"));
        assert_eq!(exact_divide(&p("x"), &p("y")), Err(PolyError::NotDivisible));
        assert_eq!(exact_divide(&p("x"), &p("0")), Err(PolyError::DivisionByZero));
    }

    #[test]
    fn gcd_examples() {
        assert_eq!(gcd(&p("2*x"), &p("2*y")).unwrap(), p("1"));
        assert_eq!(gcd_with_content(&p("2*x"), &p("2*y")).unwrap(), p("2"));
        assert_eq!(gcd(&p("x^2*y"), &p("x*y^2")).unwrap(), p("x*y"));
        assert_eq!(gcd(&p("0"), &p("-3*x")).unwrap(), p("x"));
        assert_eq!(gcd(&p("0"), &p("0")), Err(PolyError::ZeroGcd));
        let a = p("(x+y*z)*(x-z)^2");
        let b = p("(x+y*z)*(y+1)*(x-z)");
        assert_eq!(gcd(&a, &b).unwrap(), p("(x+y*z)*(x-z)").normalized());
    }

    #[test]
    fn gcd_of_example_one_partials() {
        let g1 = p("y + 1/4*(x*z + y^2)^2");
        let gy = g1.derivative(1);
        let gz = g1.derivative(2);
        let g = gcd(&gy, &gz).unwrap();
        assert!(divides(&g, &p("x")));
        // Hand oracle: g_z = x(xz+y^2)/2 and g_y = 1 + y(xz+y^2) are coprime.
        assert_eq!(g, p("1"));
    }
}
