use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{PolyError, Rational, VarSet};

/// Exponent vector, one entry per variable of the ambient [`VarSet`].
pub type Exponents = Vec<u32>;

/// Sparse multivariate polynomial with rational coefficients.
///
/// Terms are kept in a map keyed by exponent vector, so two polynomials over
/// the same variable set are equal exactly when their term maps are.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    vars: VarSet,
    terms: BTreeMap<Exponents, Rational>,
}

pub(crate) fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Graded-lex comparison, first variable most significant on ties.
pub fn grlex_cmp(a: &[u32], b: &[u32]) -> std::cmp::Ordering {
    let da: u64 = a.iter().map(|&e| e as u64).sum();
    let db: u64 = b.iter().map(|&e| e as u64).sum();
    da.cmp(&db).then_with(|| a.cmp(b))
}

impl Polynomial {
    pub fn zero(vars: &VarSet) -> Self {
        Polynomial {
            vars: vars.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(vars: &VarSet) -> Self {
        Self::constant(vars, Rational::one())
    }

    pub fn constant(vars: &VarSet, c: Rational) -> Self {
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            p.terms.insert(vec![0; vars.len()], c);
        }
        p
    }

    pub fn from_int(vars: &VarSet, c: i64) -> Self {
        Self::constant(vars, rat(c))
    }

    pub fn var(vars: &VarSet, name: &str) -> Result<Self, PolyError> {
        let i = vars
            .index_of(name)
            .ok_or_else(|| PolyError::UnknownVariable(name.to_string()))?;
        Ok(Self::var_at(vars, i))
    }

    pub fn var_at(vars: &VarSet, i: usize) -> Self {
        let mut e = vec![0; vars.len()];
        e[i] = 1;
        Self::monomial(vars, e, Rational::one())
    }

    pub fn monomial(vars: &VarSet, exps: Exponents, c: Rational) -> Self {
        assert_eq!(exps.len(), vars.len(), "exponent vector length mismatch");
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            p.terms.insert(exps, c);
        }
        p
    }

    /// Builds a polynomial from possibly repeated terms; zero sums are dropped.
    pub fn from_terms<I>(vars: &VarSet, terms: I) -> Self
    where
        I: IntoIterator<Item = (Exponents, Rational)>,
    {
        let mut p = Self::zero(vars);
        for (e, c) in terms {
            assert_eq!(e.len(), vars.len(), "exponent vector length mismatch");
            p.add_term(e, c);
        }
        p
    }

    pub(crate) fn add_term(&mut self, e: Exponents, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x == 0))
    }

    pub fn is_one(&self) -> bool {
        self.constant_value().is_some_and(|c| c.is_one())
    }

    /// The value of a constant polynomial (zero included).
    pub fn constant_value(&self) -> Option<Rational> {
        if self.is_zero() {
            return Some(Rational::zero());
        }
        if self.is_constant() {
            return self.terms.values().next().cloned();
        }
        None
    }

    /// Coefficient of the monomial with all exponents zero.
    pub fn constant_term(&self) -> Rational {
        self.terms
            .get(&vec![0; self.vars.len()])
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending lex order of exponent vectors.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Exponents, &Rational)> + '_ {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &[u32]) -> Rational {
        self.terms.get(e).cloned().unwrap_or_else(Rational::zero)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|e| e[i]).max().unwrap_or(0)
    }

    pub fn degree_in_var(&self, name: &str) -> u32 {
        self.vars.index_of(name).map_or(0, |i| self.degree_in(i))
    }

    /// Indices of the variables that actually occur.
    pub fn support(&self) -> Vec<usize> {
        (0..self.vars.len())
            .filter(|&i| self.terms.keys().any(|e| e[i] > 0))
            .collect()
    }

    pub fn involves(&self, i: usize) -> bool {
        self.terms.keys().any(|e| e[i] > 0)
    }

    /// Leading term under graded-lex.
    pub fn leading_term(&self) -> Option<(&Exponents, &Rational)> {
        self.terms.iter().max_by(|a, b| grlex_cmp(a.0, b.0))
    }

    pub fn leading_coeff(&self) -> Rational {
        self.leading_term()
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Rational::zero)
    }

    /// Re-expresses the polynomial over `target`, which must contain every
    /// variable that occurs.
    pub fn embed(&self, target: &VarSet) -> Result<Polynomial, PolyError> {
        if &self.vars == target {
            return Ok(self.clone());
        }
        let mut map = Vec::with_capacity(self.vars.len());
        for (i, n) in self.vars.names().iter().enumerate() {
            match target.index_of(n) {
                Some(j) => map.push(Some(j)),
                None if !self.involves(i) => map.push(None),
                None => {
                    return Err(PolyError::VarSetMismatch {
                        left: format!("{:?}", self.vars),
                        right: format!("{target:?}"),
                    })
                }
            }
        }
        let terms = self.terms.iter().map(|(e, c)| {
            let mut ne = vec![0; target.len()];
            for (i, &x) in e.iter().enumerate() {
                if let Some(j) = map[i] {
                    ne[j] = x;
                }
            }
            (ne, c.clone())
        });
        Ok(Polynomial {
            vars: target.clone(),
            terms: terms.collect(),
        })
    }

    fn common(&self, other: &Polynomial) -> Result<(Polynomial, Polynomial), PolyError> {
        if self.vars == other.vars {
            return Ok((self.clone(), other.clone()));
        }
        let target = if other.vars.is_subset_of(&self.vars) {
            self.vars.clone()
        } else if self.vars.is_subset_of(&other.vars) {
            other.vars.clone()
        } else if self.is_constant() {
            other.vars.clone()
        } else if other.is_constant() {
            self.vars.clone()
        } else {
            // Variables that do not occur may still be dropped.
            let a = self.embed(&other.vars);
            let b = other.embed(&self.vars);
            return match (a, b) {
                (Ok(a), _) => Ok((a, other.clone())),
                (_, Ok(b)) => Ok((self.clone(), b)),
                _ => Err(PolyError::VarSetMismatch {
                    left: format!("{:?}", self.vars),
                    right: format!("{:?}", other.vars),
                }),
            };
        };
        Ok((self.embed(&target)?, other.embed(&target)?))
    }

    pub fn try_add(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        if self.vars == other.vars {
            return Ok(self.add_same(other));
        }
        let (a, b) = self.common(other)?;
        Ok(a.add_same(&b))
    }

    pub fn try_sub(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.try_add(&other.neg_ref())
    }

    pub fn try_mul(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        if self.vars == other.vars {
            return Ok(self.mul_same(other));
        }
        let (a, b) = self.common(other)?;
        Ok(a.mul_same(&b))
    }

    fn add_same(&self, other: &Polynomial) -> Polynomial {
        let (mut big, small) = if self.terms.len() >= other.terms.len() {
            (self.clone(), other)
        } else {
            (other.clone(), self)
        };
        for (e, c) in &small.terms {
            big.add_term(e.clone(), c.clone());
        }
        big
    }

    fn mul_same(&self, other: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero(&self.vars);
        if self.is_zero() || other.is_zero() {
            return out;
        }
        // integer products, one rational reduction per output term
        let (da, na) = self.integer_parts();
        let (db, nb) = other.integer_parts();
        let mut acc: HashMap<Exponents, BigInt> = HashMap::new();
        for (ea, ca) in &na {
            for (eb, cb) in &nb {
                let e: Exponents = ea.iter().zip(eb.iter()).map(|(a, b)| a + b).collect();
                *acc.entry(e).or_default() += ca * cb;
            }
        }
        let denom = da * db;
        out.terms = acc
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(e, c)| (e, Rational::new(c, denom.clone())))
            .collect();
        out
    }

    /// `(d, terms of d * self)` with integer coefficients.
    fn integer_parts(&self) -> (BigInt, Vec<(&Exponents, BigInt)>) {
        let d = self
            .terms
            .values()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| (e, c.numer() * (&d / c.denom())))
            .collect();
        (d, terms)
    }

    fn neg_ref(&self) -> Polynomial {
        Polynomial {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(&self.vars);
        }
        Polynomial {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect(),
        }
    }

    pub fn scale_int(&self, c: i64) -> Polynomial {
        self.scale(&rat(c))
    }

    pub fn pow(&self, mut k: u32) -> Polynomial {
        let mut base = self.clone();
        let mut acc = Polynomial::one(&self.vars);
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Multiplies by the monomial with exponent vector `e`.
    pub fn shift(&self, e: &[u32]) -> Polynomial {
        Polynomial {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(t, c)| (t.iter().zip(e).map(|(a, b)| a + b).collect(), c.clone()))
                .collect(),
        }
    }

    pub fn derivative(&self, i: usize) -> Polynomial {
        let mut out = Polynomial::zero(&self.vars);
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut ne = e.clone();
                ne[i] -= 1;
                out.add_term(ne, c * rat(e[i] as i64));
            }
        }
        out
    }

    pub fn derivative_var(&self, name: &str) -> Polynomial {
        match self.vars.index_of(name) {
            Some(i) => self.derivative(i),
            None => Polynomial::zero(&self.vars),
        }
    }

    /// Evaluates `self` at `images[i]` for variable `i`; all images must live
    /// over `target`.
    pub fn compose(&self, images: &[Polynomial], target: &VarSet) -> Polynomial {
        assert_eq!(images.len(), self.vars.len(), "one image per variable");
        let images: Vec<Polynomial> = images
            .iter()
            .map(|p| p.embed(target).expect("image outside target variables"))
            .collect();
        let mut powers: Vec<Vec<Polynomial>> = images
            .iter()
            .map(|p| vec![Polynomial::one(target), p.clone()])
            .collect();
        let mut out = Polynomial::zero(target);
        for (e, c) in &self.terms {
            let mut t = Polynomial::constant(target, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let k = k as usize;
                while powers[i].len() <= k {
                    let next = &powers[i][powers[i].len() - 1] * &images[i];
                    powers[i].push(next);
                }
                t = &t * &powers[i][k];
            }
            out = &out + &t;
        }
        out
    }

    /// Replaces the bound variables; unbound ones are carried through. The
    /// result lives over the union of `self`'s variables and the bindings'.
    pub fn substitute(&self, bindings: &[(&str, Polynomial)]) -> Polynomial {
        let mut target = self.vars.clone();
        for (_, p) in bindings {
            target = target.union(p.vars());
        }
        let images: Vec<Polynomial> = self
            .vars
            .names()
            .iter()
            .enumerate()
            .map(|(i, n)| match bindings.iter().find(|(b, _)| b == n) {
                Some((_, p)) => p.embed(&target).unwrap(),
                None => Polynomial::var_at(&target, i),
            })
            .collect();
        self.compose(&images, &target)
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.vars.len());
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(e) {
                if k > 0 {
                    t *= num_traits::pow(x.clone(), k as usize);
                }
            }
            acc += t;
        }
        acc
    }

    /// Coefficients with respect to variable `i`: `result[k]` multiplies
    /// `x_i^k` and does not involve `x_i`.
    pub fn coefficients_in(&self, i: usize) -> Vec<Polynomial> {
        let d = self.degree_in(i) as usize;
        let mut out = vec![Polynomial::zero(&self.vars); if self.is_zero() { 0 } else { d + 1 }];
        for (e, c) in &self.terms {
            let mut ne = e.clone();
            let k = ne[i] as usize;
            ne[i] = 0;
            out[k].terms.insert(ne, c.clone());
        }
        out
    }

    /// Inverse of [`Polynomial::coefficients_in`].
    pub fn from_coefficients_in(vars: &VarSet, i: usize, coeffs: &[Polynomial]) -> Polynomial {
        let mut out = Polynomial::zero(vars);
        for (k, c) in coeffs.iter().enumerate() {
            let mut e = vec![0; vars.len()];
            e[i] = k as u32;
            for (t, x) in &c.embed(vars).unwrap().terms {
                let ne: Exponents = t.iter().zip(&e).map(|(a, b)| a + b).collect();
                out.add_term(ne, x.clone());
            }
        }
        out
    }

    /// Homogeneous component of total degree `d`.
    pub fn homogeneous_component(&self, d: u32) -> Polynomial {
        Polynomial {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.iter().sum::<u32>() == d)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|e| e.iter().sum::<u32>());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|x| x == d),
        }
    }

    pub fn map_coeffs(&self, f: impl Fn(&Rational) -> Rational) -> Polynomial {
        let mut out = Polynomial::zero(&self.vars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), f(c));
        }
        out
    }

    /// Rational content: gcd of numerators over lcm of denominators, positive.
    pub fn content(&self) -> Rational {
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for c in self.terms.values() {
            num = num.gcd(c.numer());
            den = den.lcm(c.denom());
        }
        if num.is_zero() {
            return Rational::zero();
        }
        Rational::new(num, den)
    }

    /// Splits `self = unit * normalized` where `normalized` has coprime integer
    /// coefficients and a positive graded-lex leading coefficient.
    pub fn normalize(&self) -> (Rational, Polynomial) {
        if self.is_zero() {
            return (Rational::zero(), self.clone());
        }
        let mut unit = self.content();
        if self.leading_coeff().is_negative() {
            unit = -unit;
        }
        let inv = unit.recip();
        (unit, self.scale(&inv))
    }

    pub fn normalized(&self) -> Polynomial {
        self.normalize().1
    }

    /// Equal up to a nonzero rational factor.
    pub fn is_associate(&self, other: &Polynomial) -> bool {
        match self.try_sub(other) {
            Ok(_) => {
                let a = self.normalized();
                let b = other.normalized();
                a.try_sub(&b).is_ok_and(|d| d.is_zero())
            }
            Err(_) => false,
        }
    }

    /// Divides every coefficient by `c`.
    pub fn div_scalar(&self, c: &Rational) -> Polynomial {
        self.scale(&c.recip())
    }

    /// Integer coefficients (as `BigInt`) when all coefficients are integral.
    pub fn integer_coeffs(&self) -> Option<Vec<(Exponents, BigInt)>> {
        self.terms
            .iter()
            .map(|(e, c)| c.is_integer().then(|| (e.clone(), c.to_integer())))
            .collect()
    }

    /// Maximum absolute value of the coefficients' numerators and denominators.
    pub fn height(&self) -> BigInt {
        self.terms
            .values()
            .map(|c| c.numer().abs().max(c.denom().clone()))
            .max()
            .unwrap_or_else(BigInt::zero)
    }

    /// The same terms over `target`, matching variables by position.
    pub fn rename(&self, target: &VarSet) -> Polynomial {
        assert_eq!(target.len(), self.vars.len(), "rename needs equal arity");
        Polynomial {
            vars: target.clone(),
            terms: self.terms.clone(),
        }
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.try_add(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.try_sub(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.try_mul(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.neg_ref()
    }
}

impl Add for Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: Polynomial) -> Polynomial {
        &self + &rhs
    }
}

impl Sub for Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: Polynomial) -> Polynomial {
        &self - &rhs
    }
}

impl Mul for Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: Polynomial) -> Polynomial {
        &self * &rhs
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.neg_ref()
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} over {:?}", self, self.vars)
    }
}
