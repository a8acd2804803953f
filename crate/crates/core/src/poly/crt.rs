//! Chinese remaindering in `Q[u]`.

use super::{PolyError, Polynomial, UniPoly, VarSet};

/// The unique `r` with `deg r < deg prod(moduli)` and `r = residues[i] mod moduli[i]`.
pub fn crt_uni(residues: &[UniPoly], moduli: &[UniPoly]) -> Result<UniPoly, PolyError> {
    assert_eq!(residues.len(), moduli.len());
    let mut acc = UniPoly::zero();
    let mut m = UniPoly::one();
    for (r, q) in residues.iter().zip(moduli) {
        if q.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        // acc + m * t with m * t = r - acc mod q
        let inv = m.inverse_mod(q).ok_or(PolyError::NonCoprimeModuli)?;
        let t = (&(r - &acc) * &inv).rem(q);
        acc = &acc + &(&m * &t);
        m = &m * q;
    }
    Ok(acc.rem(&m))
}

/// [`crt_uni`] on polynomials in a single common variable.
pub fn crt_univariate(
    residues: &[Polynomial],
    moduli: &[Polynomial],
) -> Result<Polynomial, PolyError> {
    if moduli.is_empty() || residues.len() != moduli.len() {
        return Err(PolyError::Unsupported(
            "need one residue per modulus".into(),
        ));
    }
    let vars: VarSet = moduli[0].vars().clone();
    let mut var = None;
    for p in moduli.iter().chain(residues) {
        let p = p.embed(&vars)?;
        for v in p.support() {
            match var {
                None => var = Some(v),
                Some(w) if w == v => {}
                Some(_) => return Err(PolyError::Unsupported("multivariate CRT input".into())),
            }
        }
    }
    let var = var.unwrap_or(0);
    let conv = |p: &Polynomial| -> Result<UniPoly, PolyError> {
        Ok(UniPoly::from_polynomial(&p.embed(&vars)?, var).expect("univariate"))
    };
    let rs = residues.iter().map(conv).collect::<Result<Vec<_>, _>>()?;
    let ms = moduli.iter().map(conv).collect::<Result<Vec<_>, _>>()?;
    Ok(crt_uni(&rs, &ms)?.to_polynomial(&vars, var))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse;

    fn u(s: &str) -> Polynomial {
        parse(s, &VarSet::of(&["u"])).unwrap()
    }

    #[test]
    fn two_linear_moduli() {
        let r = crt_univariate(&[u("1"), u("0")], &[u("u"), u("u-1")]).unwrap();
        assert_eq!(r, u("1-u"));
    }

    #[test]
    fn single_and_zero() {
        assert_eq!(crt_univariate(&[u("u^3")], &[u("u^2+1")]).unwrap(), u("-u"));
        assert_eq!(
            crt_univariate(&[u("0"), u("0")], &[u("u"), u("u+1")]).unwrap(),
            u("0")
        );
    }

    #[test]
    fn rejects_common_factor() {
        assert_eq!(
            crt_univariate(&[u("1"), u("0")], &[u("u^2-u"), u("u")]),
            Err(PolyError::NonCoprimeModuli)
        );
    }
}
