//! Random instances with known answers: tame automorphisms and triangular
//! derivations conjugated by them.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::derivation::{conjugate, Derivation, KernelPair, RingMap};
use crate::poly::{exact_divide, gcd_many, Polynomial, Rational, VarSet};

/// Caps for random instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleCaps {
    /// Total degree of random polynomials.
    pub degree: u32,
    /// Bound on the absolute value of integer coefficients.
    pub height: i64,
    /// Number of elementary maps in a conjugator.
    pub length: usize,
    /// Total degree of the nonlinear part of an elementary map.
    pub map_degree: u32,
    /// How many elementary maps may be nonlinear.
    pub nonlinear_maps: usize,
}

impl Default for SampleCaps {
    fn default() -> Self {
        SampleCaps {
            degree: 3,
            height: 5,
            length: 4,
            map_degree: 2,
            nonlinear_maps: 2,
        }
    }
}

/// An automorphism given with its inverse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TameMap {
    pub forward: RingMap,
    pub inverse: RingMap,
}

impl TameMap {
    pub fn identity(vars: &VarSet) -> Self {
        TameMap {
            forward: RingMap::identity(vars),
            inverse: RingMap::identity(vars),
        }
    }

    /// `self ∘ other`.
    pub fn after(&self, other: &TameMap) -> TameMap {
        TameMap {
            forward: self.forward.after(&other.forward),
            inverse: other.inverse.after(&self.inverse),
        }
    }

    pub fn apply(&self, h: &Polynomial) -> Polynomial {
        self.forward.apply(h)
    }
}

fn nonzero(rng: &mut impl Rng, height: i64) -> i64 {
    let c = rng.gen_range(1..=height);
    if rng.gen_bool(0.5) {
        -c
    } else {
        c
    }
}

/// Random polynomial in the listed variables with total degree at most
/// `degree`, about `terms` terms and coefficients in `[-height, height]`.
pub fn random_polynomial(
    rng: &mut impl Rng,
    vars: &VarSet,
    allowed: &[usize],
    degree: u32,
    terms: usize,
    height: i64,
) -> Polynomial {
    let mut out = Polynomial::zero(vars);
    for _ in 0..terms {
        let mut e = vec![0u32; vars.len()];
        let d = rng.gen_range(0..=degree);
        for _ in 0..d {
            if let Some(&i) = allowed.choose(rng) {
                e[i] += 1;
            }
        }
        let c = Rational::from_integer(nonzero(rng, height).into());
        out = &out + &Polynomial::monomial(vars, e, c);
    }
    out
}

/// `x_i -> x_i + h(other variables)`, with `h` free of constants and of
/// degree between 1 and `degree`.
pub fn elementary_map(rng: &mut impl Rng, vars: &VarSet, degree: u32, height: i64) -> TameMap {
    let n = vars.len();
    let i = rng.gen_range(0..n);
    let others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
    let mut h = Polynomial::zero(vars);
    while h.total_degree().unwrap_or(0) == 0 {
        h = random_polynomial(rng, vars, &others, degree, 2, height);
        h = &h - &Polynomial::constant(vars, h.constant_term());
    }
    let var = |j| Polynomial::var_at(vars, j);
    let fwd: Vec<Polynomial> = (0..n).map(|j| if j == i { &var(j) + &h } else { var(j) }).collect();
    let inv: Vec<Polynomial> = (0..n).map(|j| if j == i { &var(j) - &h } else { var(j) }).collect();
    TameMap {
        forward: RingMap {
            vars: vars.clone(),
            images: fwd,
        },
        inverse: RingMap {
            vars: vars.clone(),
            images: inv,
        },
    }
}

/// `x_i -> a_i x_{pi(i)} + b_i`.
pub fn affine_map(rng: &mut impl Rng, vars: &VarSet, height: i64) -> TameMap {
    let n = vars.len();
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let scale: Vec<i64> = (0..n).map(|_| nonzero(rng, 2)).collect();
    let shift: Vec<i64> = (0..n).map(|_| rng.gen_range(-height..=height)).collect();
    let fwd: Vec<Polynomial> = (0..n)
        .map(|i| {
            &Polynomial::var_at(vars, perm[i]).scale_int(scale[i])
                + &Polynomial::from_int(vars, shift[i])
        })
        .collect();
    // x_{pi(i)} -> (x_i - b_i) / a_i
    let mut inv = vec![Polynomial::zero(vars); n];
    for i in 0..n {
        let num = &Polynomial::var_at(vars, i) - &Polynomial::from_int(vars, shift[i]);
        inv[perm[i]] = num.div_scalar(&Rational::from_integer(scale[i].into()));
    }
    TameMap {
        forward: RingMap {
            vars: vars.clone(),
            images: fwd,
        },
        inverse: RingMap {
            vars: vars.clone(),
            images: inv,
        },
    }
}

/// A composition of at most `caps.length` elementary and affine maps, at
/// most `caps.nonlinear_maps` of them nonlinear.
pub fn random_tame(rng: &mut impl Rng, vars: &VarSet, caps: SampleCaps) -> TameMap {
    let len = rng.gen_range(1..=caps.length);
    let mut out = TameMap::identity(vars);
    let mut nonlinear = 0;
    for _ in 0..len {
        let step = if nonlinear < caps.nonlinear_maps && rng.gen_bool(0.6) {
            nonlinear += 1;
            let d = rng.gen_range(1..=caps.map_degree);
            elementary_map(rng, vars, d, caps.height)
        } else {
            affine_map(rng, vars, caps.height)
        };
        out = step.after(&out);
    }
    out
}

/// A triangular derivation `T` (`T(x) = 0`, `T(y) = a(x)`,
/// `T(z) = b(x, y)`) made irreducible, with generators of its kernel.
#[derive(Debug, Clone)]
pub struct TriangularSample {
    pub derivation: Derivation,
    pub kernel: KernelPair,
}

pub fn random_triangular(rng: &mut impl Rng, vars: &VarSet, caps: SampleCaps) -> TriangularSample {
    assert_eq!(vars.len(), 3);
    loop {
        let terms = rng.gen_range(1..=3);
        let a = match rng.gen_range(0..10) {
            0 => Polynomial::zero(vars),
            1 => Polynomial::from_int(vars, nonzero(rng, caps.height)),
            _ => {
                // mostly nonconstant, so the plinth ideal is proper
                let mut a = Polynomial::zero(vars);
                while a.total_degree().unwrap_or(0) == 0 {
                    a = random_polynomial(rng, vars, &[0], caps.degree, terms, caps.height);
                }
                a
            }
        };
        let terms = rng.gen_range(1..=3);
        let b = random_polynomial(rng, vars, &[0, 1], caps.degree, terms, caps.height);
        let Some(g) = gcd_many([&a, &b]) else {
            continue;
        };
        let a = exact_divide(&a, &g).expect("gcd divides");
        let b = exact_divide(&b, &g).expect("gcd divides");
        let zero = Polynomial::zero(vars);
        let derivation = Derivation::new(vars, vec![zero, a.clone(), b.clone()]).expect("nonzero");
        let x = Polynomial::var_at(vars, 0);
        let kernel = if a.is_zero() {
            KernelPair {
                f: x,
                g: Polynomial::var_at(vars, 1),
            }
        } else {
            // p = a z - B with dB/dy = b
            let big_b = Polynomial::from_terms(
                vars,
                b.terms().map(|(e, c)| {
                    let mut e = e.clone();
                    e[1] += 1;
                    let k = Rational::from_integer(e[1].into());
                    (e, c / k)
                }),
            );
            let p = &(&a * &Polynomial::var_at(vars, 2)) - &big_b;
            KernelPair { f: x, g: p }
        };
        debug_assert!(derivation.apply(&kernel.g).is_zero());
        return TriangularSample { derivation, kernel };
    }
}

/// `sigma T sigma^-1` for a random triangular `T`, with kernel generators
/// `(sigma(x), sigma(p))`.
#[derive(Debug, Clone)]
pub struct ConjugatedSample {
    pub triangular: TriangularSample,
    pub sigma: TameMap,
    pub derivation: Derivation,
    pub kernel: KernelPair,
}

pub fn conjugated_triangular(rng: &mut impl Rng, vars: &VarSet, caps: SampleCaps) -> ConjugatedSample {
    let triangular = random_triangular(rng, vars, caps);
    let sigma = random_tame(rng, vars, caps);
    let derivation = conjugate(&triangular.derivation, &sigma.forward, &sigma.inverse)
        .expect("tame maps carry their inverses");
    let kernel = KernelPair {
        f: sigma.apply(&triangular.kernel.f),
        g: sigma.apply(&triangular.kernel.g),
    };
    ConjugatedSample {
        triangular,
        sigma,
        derivation,
        kernel,
    }
}
