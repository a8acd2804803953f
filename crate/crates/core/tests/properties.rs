use lnd_core::derivation::{
    conjugate, exp_map, jacobian_2, jacobian_derivation, local_slice, Derivation, LndBounds,
};
use lnd_core::poly::{divides, factor};
use lnd_core::rank::{bivariate_coordinate_test, uni_multivariate_decompose, CoordinateTest};
use lnd_core::samples::{conjugated_triangular, random_tame, random_triangular, SampleCaps};
use lnd_core::slices::plinth_generator;
use lnd_core::triangulate::{triangulate, verify_form, TriangulateOptions};
use lnd_core::{parse, Polynomial, Rational, UniPoly, VarSet};
use num_traits::{One, Signed};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn xyz() -> VarSet {
    VarSet::of(&["x", "y", "z"])
}

fn fg() -> VarSet {
    VarSet::of(&["F", "G"])
}

fn poly(vars: VarSet, degree: u32, terms: usize) -> impl Strategy<Value = Polynomial> {
    let n = vars.len();
    prop::collection::vec(
        (prop::collection::vec(0..=degree, n), -6i64..=6, 1i64..=3),
        0..=terms,
    )
    .prop_map(move |ts| {
        Polynomial::from_terms(
            &vars,
            ts.into_iter()
                .map(|(e, a, b)| (e, Rational::new(a.into(), b.into()))),
        )
    })
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn print_parse_round_trip(p in poly(xyz(), 4, 6)) {
        prop_assert_eq!(parse(&p.to_string(), &xyz()).unwrap(), p);
    }

    #[test]
    fn leibniz(images in prop::collection::vec(poly(xyz(), 2, 3), 3), a in poly(xyz(), 2, 3), b in poly(xyz(), 2, 3)) {
        prop_assume!(images.iter().any(|p| !p.is_zero()));
        let x = Derivation::new(&xyz(), images).unwrap();
        prop_assert_eq!(x.apply(&(&a * &b)), &(&a * &x.apply(&b)) + &(&b * &x.apply(&a)));
    }

    #[test]
    fn jacobian_kills_its_generators(f in poly(xyz(), 2, 3), g in poly(xyz(), 2, 3)) {
        if let Ok(x) = jacobian_derivation(&xyz(), &f, &g) {
            prop_assert!(x.apply(&f).is_zero());
            prop_assert!(x.apply(&g).is_zero());
        }
    }

    #[test]
    fn factorization_reassembles(a in poly(VarSet::of(&["x", "y"]), 2, 3), b in poly(VarSet::of(&["x", "y"]), 2, 3)) {
        let p = &a * &b;
        prop_assume!(!p.is_zero());
        let f = factor(&p).unwrap();
        prop_assert_eq!(f.expand(p.vars()), p);
    }
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn exp_is_an_automorphism(seed in any::<u64>(), a in poly(xyz(), 2, 3), b in poly(xyz(), 2, 3)) {
        let t = random_triangular(&mut rng(seed), &xyz(), SampleCaps::default());
        let x = t.derivation;
        let bounds = LndBounds::default();
        let e = |h: &Polynomial| exp_map(&x, h, bounds).unwrap();
        prop_assert_eq!(e(&(&a * &b)), &e(&a) * &e(&b));
        let minus = x.scale(&Polynomial::from_int(&xyz(), -1));
        let back = exp_map(&minus, &e(&a), bounds).unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn conjugation_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let t = random_triangular(&mut r, &xyz(), SampleCaps::default());
        let s = random_tame(&mut r, &xyz(), SampleCaps::default());
        let y = conjugate(&t.derivation, &s.forward, &s.inverse).unwrap();
        prop_assert_eq!(conjugate(&y, &s.inverse, &s.forward).unwrap(), t.derivation);
    }

    #[test]
    fn decomposition_reassembles_normalized(c in poly(fg(), 3, 4)) {
        prop_assume!(c.total_degree().unwrap_or(0) > 0);
        let d = uni_multivariate_decompose(&c).unwrap();
        prop_assert_eq!(d.reassemble(), c);
        // inner: no constant term, coprime integers, positive lead
        prop_assert!(d.inner.constant_term() == Rational::from_integer(0.into()));
        prop_assert!(d.inner.leading_coeff().is_positive());
        prop_assert!(d.inner.content().is_one());
    }

    #[test]
    fn composed_inputs_decompose(ell in prop::collection::vec(-4i64..=4, 3..=4), h in poly(fg(), 2, 3)) {
        let ell = UniPoly::from_ints(&ell);
        prop_assume!(ell.degree() >= 2 && h.total_degree().unwrap_or(0) > 0);
        let c = ell.eval_poly(&h);
        let d = uni_multivariate_decompose(&c).unwrap();
        prop_assert_eq!(d.reassemble(), c);
        prop_assert!(d.degree() >= ell.degree());
    }

    #[test]
    fn tame_images_are_coordinates(seed in any::<u64>()) {
        let s = random_tame(&mut rng(seed), &fg(), SampleCaps::default());
        let u = s.apply(&Polynomial::var_at(&fg(), 0));
        match bivariate_coordinate_test(&u, LndBounds::default()) {
            CoordinateTest::Coordinate { mate } => {
                let j = jacobian_2(&u, &mate);
                prop_assert!(j.is_constant() && !j.is_zero(), "Jac = {}", j);
            }
            other => prop_assert!(false, "{} gave {:?}", u, other),
        }
    }
}

proptest! {
    #![proptest_config(config(12))]

    #[test]
    fn plinth_divides_local_slice_images(seed in any::<u64>()) {
        let s = conjugated_triangular(&mut rng(seed), &xyz(), SampleCaps::default());
        let cert = plinth_generator(&s.derivation, &s.kernel, LndBounds::default()).unwrap();
        prop_assert_eq!(s.derivation.apply(&cert.s), cert.c_xyz.clone());
        let t = local_slice(&s.derivation, LndBounds::default()).unwrap();
        prop_assert!(divides(&cert.c_xyz, &s.derivation.apply(&t)));
    }

    #[test]
    fn conjugated_triangular_is_triangulable(seed in any::<u64>()) {
        let s = conjugated_triangular(&mut rng(seed), &xyz(), SampleCaps::default());
        let r = triangulate(&s.derivation, Some(&s.kernel), &TriangulateOptions::default()).unwrap();
        prop_assert!(r.verdict.is_positive(), "{}", r.verdict.as_str());
        prop_assert!(verify_form(&s.derivation, r.form.as_ref().unwrap()).ok);
    }

    #[test]
    fn pipeline_is_deterministic(seed in any::<u64>()) {
        let s = conjugated_triangular(&mut rng(seed), &xyz(), SampleCaps::default());
        let opts = TriangulateOptions::default();
        let a = triangulate(&s.derivation, Some(&s.kernel), &opts).unwrap();
        let b = triangulate(&s.derivation, Some(&s.kernel), &opts).unwrap();
        prop_assert_eq!(a, b);
    }
}
