//! Univariate polynomials over a prime field `Z/p` with `p < 2^31`.

use num_bigint::{BigInt, BigUint};
use num_traits::One;
use rand::Rng;

#[derive(Clone, Copy, Debug)]
pub struct Zp {
    pub p: u64,
}

/// Coefficients low-to-high, no trailing zeros.
pub type ZpPoly = Vec<u64>;

fn trim(mut a: ZpPoly) -> ZpPoly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

impl Zp {
    pub fn new(p: u64) -> Self {
        assert!(p > 2 && p < (1 << 31));
        Zp { p }
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.p
    }

    pub fn inv(&self, a: u64) -> u64 {
        assert!(a % self.p != 0, "inverse of zero");
        self.pow(a, self.p - 2)
    }

    pub fn pow(&self, mut a: u64, mut e: u64) -> u64 {
        let mut acc = 1;
        a %= self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    pub fn reduce_big(&self, c: &BigInt) -> u64 {
        let m = BigInt::from(self.p);
        let r = ((c % &m) + &m) % &m;
        u64::try_from(&r).unwrap()
    }

    pub fn from_ints(&self, f: &[BigInt]) -> ZpPoly {
        trim(f.iter().map(|c| self.reduce_big(c)).collect())
    }

    pub fn sub(&self, a: &ZpPoly, b: &ZpPoly) -> ZpPoly {
        let n = a.len().max(b.len());
        trim(
            (0..n)
                .map(|i| (a.get(i).unwrap_or(&0) + self.p - b.get(i).unwrap_or(&0)) % self.p)
                .collect(),
        )
    }

    pub fn mul_poly(&self, a: &ZpPoly, b: &ZpPoly) -> ZpPoly {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x * y) % self.p;
            }
        }
        trim(out)
    }

    pub fn scale(&self, a: &ZpPoly, c: u64) -> ZpPoly {
        trim(a.iter().map(|&x| self.mul(x, c)).collect())
    }

    pub fn monic(&self, a: &ZpPoly) -> ZpPoly {
        match a.last() {
            None => Vec::new(),
            Some(&l) => self.scale(a, self.inv(l)),
        }
    }

    pub fn div_rem(&self, a: &ZpPoly, b: &ZpPoly) -> (ZpPoly, ZpPoly) {
        assert!(!b.is_empty(), "division by zero");
        if a.len() < b.len() {
            return (Vec::new(), a.clone());
        }
        let mut r = a.clone();
        let db = b.len() - 1;
        let li = self.inv(b[db]);
        let mut q = vec![0u64; a.len() - db];
        for k in (0..q.len()).rev() {
            let c = self.mul(r[k + db], li);
            if c == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                r[k + j] = (r[k + j] + self.p - self.mul(c, bj)) % self.p;
            }
            q[k] = c;
        }
        r.truncate(db);
        (trim(q), trim(r))
    }

    pub fn rem(&self, a: &ZpPoly, b: &ZpPoly) -> ZpPoly {
        self.div_rem(a, b).1
    }

    pub fn gcd(&self, a: &ZpPoly, b: &ZpPoly) -> ZpPoly {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_empty() {
            let r = self.rem(&a, &b);
            a = b;
            b = r;
        }
        self.monic(&a)
    }

    /// Inverse of `a` modulo `m` (assumed coprime).
    pub fn inverse_mod(&self, a: &ZpPoly, m: &ZpPoly) -> ZpPoly {
        let (mut r0, mut r1) = (m.clone(), self.rem(a, m));
        let (mut t0, mut t1): (ZpPoly, ZpPoly) = (Vec::new(), vec![1]);
        while !r1.is_empty() {
            let (q, r) = self.div_rem(&r0, &r1);
            let t2 = self.sub(&t0, &self.mul_poly(&q, &t1));
            r0 = r1;
            r1 = r;
            t0 = t1;
            t1 = t2;
        }
        assert_eq!(r0.len(), 1, "not invertible");
        self.scale(&t0, self.inv(r0[0]))
    }

    pub fn derivative(&self, a: &ZpPoly) -> ZpPoly {
        trim(
            a.iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| self.mul(c, k as u64 % self.p))
                .collect(),
        )
    }

    pub fn pow_mod(&self, base: &ZpPoly, e: &BigUint, m: &ZpPoly) -> ZpPoly {
        let mut acc: ZpPoly = vec![1];
        let b = self.rem(base, m);
        for i in (0..e.bits()).rev() {
            acc = self.rem(&self.mul_poly(&acc, &acc), m);
            if e.bit(i) {
                acc = self.rem(&self.mul_poly(&acc, &b), m);
            }
        }
        acc
    }

    pub fn is_squarefree(&self, f: &ZpPoly) -> bool {
        let d = self.derivative(f);
        !d.is_empty() && self.gcd(f, &d).len() == 1
    }

    /// Distinct-degree factorization of a monic square-free polynomial.
    pub fn distinct_degree(&self, f: &ZpPoly) -> Vec<(usize, ZpPoly)> {
        let mut out = Vec::new();
        let mut f = f.clone();
        let x: ZpPoly = vec![0, 1];
        let mut h = x.clone();
        let p = BigUint::from(self.p);
        let mut d = 0;
        while f.len() > 1 {
            d += 1;
            if 2 * d > f.len() - 1 {
                out.push((f.len() - 1, f.clone()));
                break;
            }
            h = self.pow_mod(&h, &p, &f);
            let g = self.gcd(&self.sub(&h, &x), &f);
            if g.len() > 1 {
                f = self.div_rem(&f, &g).0;
                h = self.rem(&h, &f);
                out.push((d, g));
            }
        }
        out
    }

    /// Cantor-Zassenhaus splitting of a monic product of degree-`d` irreducibles.
    pub fn equal_degree<R: Rng>(&self, f: &ZpPoly, d: usize, rng: &mut R) -> Vec<ZpPoly> {
        let n = f.len() - 1;
        if n == d {
            return vec![f.clone()];
        }
        let e = (BigUint::from(self.p).pow(d as u32) - BigUint::one()) >> 1;
        loop {
            let a: ZpPoly = trim((0..n).map(|_| rng.gen_range(0..self.p)).collect());
            if a.len() < 2 {
                continue;
            }
            let g = self.gcd(&a, f);
            let split = if g.len() > 1 {
                g
            } else {
                let b = self.pow_mod(&a, &e, f);
                self.gcd(&self.sub(&b, &vec![1]), f)
            };
            if split.len() > 1 && split.len() < f.len() {
                let other = self.div_rem(f, &split).0;
                let mut out = self.equal_degree(&split, d, rng);
                out.extend(self.equal_degree(&self.monic(&other), d, rng));
                return out;
            }
        }
    }

    /// Monic irreducible factors of a monic square-free polynomial.
    pub fn factor_squarefree<R: Rng>(&self, f: &ZpPoly, rng: &mut R) -> Vec<ZpPoly> {
        let mut out = Vec::new();
        for (d, g) in self.distinct_degree(f) {
            out.extend(self.equal_degree(&g, d, rng));
        }
        out.sort();
        out
    }
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}
