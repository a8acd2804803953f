use lnd_core::derivation::{jacobian_derivation, Derivation, KernelPair};
use lnd_core::groebner::{intersect_subalgebra, MonomialOrder};
use lnd_core::triangulate::{
    triangulate, ups_ring, uv_ring, verify_form, TriangulateOptions, TriangulationReport, Verdict,
};
use lnd_core::{parse, Polynomial, VarSet};

fn xyz(s: &str) -> Polynomial {
    parse(s, &VarSet::of(&["x", "y", "z"])).unwrap()
}

fn tags(s: &str) -> Polynomial {
    parse(s, &VarSet::of(&["U", "P", "S"])).unwrap()
}

const G2: &str = "3*x*y+2*x^2-2*z*x+2*x^2*y+y^2-y*z+x*y^2+z^2*y+z^2*x-z^3+3*z^2*x*y-2*z*x*y^2-2*z*x^2*y-3*z*x^2*y^2+x^2*y^3+x^3*y^2+x^3*y^3-z^2+2*z*x*y-x^2*y^2";
const F2: &str = "2*x+y+z^2-2*z*x*y+x^2*y^2";

#[test]
fn first_intersection() {
    let t = [
        ("U", xyz("x")),
        ("P", xyz("y+1/4*(x*z+y^2)^2")),
        ("S", xyz("-x*z-y^2")),
    ];
    let gb = intersect_subalgebra(&xyz("x"), &t, &MonomialOrder::lex(&["S", "P", "U"])).unwrap();
    assert_eq!(
        gb.generators,
        vec![tags("U"), tags("(S^2-4*P)^2+16*S")]
    );
}

#[test]
fn second_intersection() {
    let t = [
        ("U", xyz(F2)),
        ("P", xyz(G2)),
        ("S", xyz("z-x*y+1")),
    ];
    let gb = intersect_subalgebra(&tags("U"), &t, &MonomialOrder::lex(&["S", "P", "U"])).unwrap();
    assert_eq!(gb.generators, vec![tags("U"), tags("S^2-2*S+P+1")]);
}

const G1: &str = "y+1/4*(x*z+y^2)^2";

fn pipeline(f: &str, g: &str) -> (Derivation, TriangulationReport) {
    let k = KernelPair { f: xyz(f), g: xyz(g) };
    let x = jacobian_derivation(&k.f.vars().clone(), &k.f, &k.g).unwrap();
    let r = triangulate(&x, Some(&k), &TriangulateOptions::default()).unwrap();
    (x, r)
}

#[test]
fn first_example_slice_and_witness() {
    let (x, r) = pipeline("x", G1);
    let cert = r.plinth.unwrap();
    assert_eq!(cert.s, xyz("-x*z-y^2"));
    assert_eq!(cert.c_xyz, xyz("-x"));
    assert_eq!(x.apply(&cert.s), cert.c_xyz);
    assert_eq!(r.verdict, Verdict::NotTriangulable);
    let w = r.witness.unwrap();
    assert_eq!(w.h.unwrap(), parse("(s^2-4*p)^2+16*s", &ups_ring()).unwrap());
}

#[test]
fn second_example_form() {
    let (x, r) = pipeline(F2, G2);
    assert_eq!(r.verdict, Verdict::Triangulable);
    let cert = r.plinth.as_ref().unwrap();
    assert_eq!(cert.s, xyz("z-x*y"));
    let form = r.form.unwrap();
    assert_eq!(form.u, xyz(F2));
    assert_eq!(form.v, xyz("z-x*y"));
    assert_eq!(form.w, xyz("x*y+x+y-z"));
    assert_eq!(form.q, parse("v^2", &uv_ring()).unwrap());
    assert!(verify_form(&x, &form).ok);
    // the inverse really inverts
    let back: Vec<Polynomial> = form
        .inverse
        .iter()
        .map(|e| e.compose(&[form.u.clone(), form.v.clone(), form.w.clone()], x.vars()))
        .collect();
    assert_eq!(back, vec![xyz("x"), xyz("y"), xyz("z")]);
}

#[test]
fn partial_z_stays_put() {
    let (_, r) = pipeline("x", "y");
    assert_eq!(r.verdict, Verdict::Rank1Triangular);
    let form = r.form.unwrap();
    assert_eq!((form.u, form.v, form.w), (xyz("x"), xyz("y"), xyz("z")));
}
