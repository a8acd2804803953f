//! One PASS/FAIL line per acceptance criterion. Exits nonzero on any FAIL.

use std::cell::RefCell;
use std::time::{Duration, Instant};

use lnd_core::derivation::{conjugate, jacobian_derivation, Derivation, KernelPair, LndBounds};
use lnd_core::groebner::{buchberger, intersect_subalgebra, MonomialOrder};
use lnd_core::poly::{factor, gcd, Factorization};
use lnd_core::rank::uni_multivariate_decompose;
use lnd_core::samples::{conjugated_triangular, random_polynomial, random_tame, SampleCaps};
use lnd_core::slices::plinth_generator;
use lnd_core::triangulate::{
    alternate_form, prime_basis, triangulate, ups_ring, verify_alternate, verify_form, FormCheck,
    ShapeOutcome, TriangulateOptions, TriangulationReport, Verdict,
};
use lnd_core::{parse, Polynomial, Rational, UniPoly, VarSet};
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const G1: &str = "y+1/4*(x*z+y^2)^2";
const F2: &str = "2*x+y+z^2-2*z*x*y+x^2*y^2";
const G2: &str = "3*x*y+2*x^2-2*z*x+2*x^2*y+y^2-y*z+x*y^2+z^2*y+z^2*x-z^3+3*z^2*x*y-2*z*x*y^2-2*z*x^2*y-3*z*x^2*y^2+x^2*y^3+x^3*y^2+x^3*y^3-z^2+2*z*x*y-x^2*y^2";

type Outcome = Result<String, String>;

fn xyz() -> VarSet {
    VarSet::of(&["x", "y", "z"])
}

fn p(s: &str) -> Polynomial {
    parse(s, &xyz()).unwrap()
}

fn over(s: &str, names: &[&str]) -> Polynomial {
    parse(s, &VarSet::of(names)).unwrap()
}

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn within(t: Instant, limit: Duration) -> Result<(), String> {
    ensure(t.elapsed() <= limit, || format!("took {:?}, limit {limit:?}", t.elapsed()))
}

/// Every positive verdict produced anywhere in this run is re-verified here.
#[derive(Default)]
struct Soundness {
    checked: usize,
    failures: Vec<String>,
}

thread_local! {
    static SOUNDNESS: RefCell<Soundness> = RefCell::default();
}

fn record(check: FormCheck, label: &str) -> bool {
    SOUNDNESS.with(|s| {
        let mut s = s.borrow_mut();
        s.checked += 1;
        if !check.ok {
            s.failures.push(format!("{label}: {}", check.failures.join("; ")));
        }
    });
    check.ok
}

fn run(x: &Derivation, k: &KernelPair, label: &str) -> Result<TriangulationReport, String> {
    let r = triangulate(x, Some(k), &TriangulateOptions::default()).map_err(|e| format!("{label}: {e}"))?;
    if r.verdict.is_positive() {
        let form = r.form.as_ref().ok_or_else(|| format!("{label}: positive verdict without a form"))?;
        record(verify_form(x, form), label);
    }
    Ok(r)
}

fn example(f: &str, g: &str) -> (Derivation, KernelPair) {
    let k = KernelPair { f: p(f), g: p(g) };
    (jacobian_derivation(&xyz(), &k.f, &k.g).unwrap(), k)
}

fn example1() -> Outcome {
    let t = Instant::now();
    let (x, k) = example("x", G1);
    let r = run(&x, &k, "example 1")?;
    let cert = r.plinth.as_ref().ok_or("no plinth certificate")?;
    ensure(cert.c_xyz.is_associate(&p("x")), || format!("plinth generator {}", cert.c_xyz))?;
    ensure(x.apply(&cert.s).is_associate(&p("x")), || format!("X(s) for s = {}", cert.s))?;
    ensure(x.iterate(&cert.s, 2).is_zero(), || "s is not a local slice".into())?;

    // basis from the pipeline's own slice
    let data = r.rank.as_ref().and_then(|v| v.data.clone()).ok_or("no rank-two data")?;
    let ups = ups_ring();
    let expected = parse("(s^2-4*p)^2+16*s", &ups).unwrap();
    match prime_basis(&data, &cert.s, &UniPoly::x()).map_err(|e| e.to_string())? {
        ShapeOutcome::ShapeOk(h) => ensure(h.is_associate(&expected), || format!("basis element {h}"))?,
        ShapeOutcome::ShapeFail(b) => return Err(format!("basis shape {b:?}")),
    }
    // and from the literal slice -xz-y^2
    let tags = [("U", p("x")), ("P", p(G1)), ("S", p("-x*z-y^2"))];
    let gb = intersect_subalgebra(&p("x"), &tags, &MonomialOrder::lex(&["S", "P", "U"])).map_err(|e| e.to_string())?;
    let ups_tags = ["U", "P", "S"];
    ensure(
        gb.generators == vec![over("U", &ups_tags), over("(S^2-4*P)^2+16*S", &ups_tags)],
        || format!("literal basis {:?}", gb.generators),
    )?;

    ensure(r.verdict == Verdict::NotTriangulable, || format!("verdict {}", r.verdict.as_str()))?;
    let w = r.witness.as_ref().ok_or("no witness")?;
    ensure(w.reason.contains("p-degree 2"), || format!("witness reason {}", w.reason))?;
    ensure(w.h.as_ref().is_some_and(|h| h.is_associate(&expected)), || "witness h".into())?;
    within(t, Duration::from_secs(60))?;
    Ok(format!("witness h = {} in {:?}", w.h.as_ref().unwrap(), t.elapsed()))
}

fn example2() -> Outcome {
    let t = Instant::now();
    let (x, k) = example(F2, G2);
    let r = run(&x, &k, "example 2")?;
    let cert = r.plinth.as_ref().ok_or("no plinth certificate")?;
    ensure(cert.c_xyz.is_associate(&k.f), || format!("plinth generator {}", cert.c_xyz))?;

    // s ~ z - xy + 1: unit multiple plus a kernel element
    let reference = p("z-x*y+1");
    let lambda = lnd_core::poly::exact_divide(&x.apply(&reference), &x.apply(&cert.s))
        .ok()
        .and_then(|q| q.constant_value())
        .ok_or("X(s) and X(z-xy+1) are not proportional")?;
    let rest = &reference - &cert.s.scale(&lambda);
    ensure(x.apply(&rest).is_zero(), || format!("slice {} not equivalent", cert.s))?;

    // basis from the pipeline's slice, and from the literal one
    let data = r.rank.as_ref().and_then(|v| v.data.clone()).ok_or("no rank-two data")?;
    let ups = ups_ring();
    let h = match prime_basis(&data, &cert.s, &UniPoly::x()).map_err(|e| e.to_string())? {
        ShapeOutcome::ShapeOk(h) => h,
        ShapeOutcome::ShapeFail(b) => return Err(format!("basis shape {b:?}")),
    };
    // rewrite in the literal slice: s = (s_lit - rest) / lambda with rest a constant here
    let rest_c = rest.constant_value().ok_or("slices differ by a nonconstant kernel element")?;
    let s_lit = Polynomial::var_at(&ups, 2);
    let subst = (&s_lit - &Polynomial::constant(&ups, rest_c)).div_scalar(&lambda);
    let h_lit = h.compose(&[Polynomial::var_at(&ups, 0), Polynomial::var_at(&ups, 1), subst], &ups);
    let expected = parse("s^2-2*s+p+1", &ups).unwrap();
    ensure(h_lit.is_associate(&expected), || format!("basis element {h} -> {h_lit}"))?;
    let tags = [("U", k.f.clone()), ("P", k.g.clone()), ("S", reference.clone())];
    let gb = intersect_subalgebra(&over("U", &["U"]), &tags, &MonomialOrder::lex(&["S", "P", "U"]))
        .map_err(|e| e.to_string())?;
    let ups_tags = ["U", "P", "S"];
    ensure(
        gb.generators == vec![over("U", &ups_tags), over("S^2-2*S+P+1", &ups_tags)],
        || format!("literal basis {:?}", gb.generators),
    )?;

    ensure(r.verdict == Verdict::Triangulable, || format!("verdict {}", r.verdict.as_str()))?;
    let form = r.form.as_ref().unwrap();
    let uv = ["u", "v"];
    ensure(form.c == over("u", &["u"]), || format!("c(u) = {}", form.c))?;
    ensure(form.q.derivative(1) == over("2*v", &uv), || format!("Q = {}", form.q))?;
    ensure(x.apply(&form.u).is_zero(), || "X(u) != 0".into())?;
    ensure(x.apply(&form.v) == form.u, || "X(v) != u".into())?;
    ensure(x.apply(&form.w) == form.v.scale_int(2), || "X(w) != 2v".into())?;
    ensure(form.w.is_associate(&p("z-x-y-x*y")), || format!("w = {}", form.w))?;
    ensure(verify_form(&x, form).ok, || "verify_form failed".into())?;
    within(t, Duration::from_secs(120))?;
    Ok(format!("u = f2, v = {}, w = {} in {:?}", form.v, form.w, t.elapsed()))
}

fn closure() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let n = 120;
    for i in 0..n {
        let s = conjugated_triangular(&mut rng, &xyz(), SampleCaps::default());
        let r = run(&s.derivation, &s.kernel, &format!("closure #{i}"))?;
        ensure(r.verdict.is_positive(), || {
            format!(
                "instance {i}: {} for images {:?}",
                r.verdict.as_str(),
                s.derivation.image_strings()
            )
        })?;
        ensure(verify_form(&s.derivation, r.form.as_ref().unwrap()).ok, || format!("instance {i} unverified"))?;
    }
    within(t, Duration::from_secs(30 * 60))?;
    Ok(format!("{n} instances positive and verified in {:?}", t.elapsed()))
}

fn soundness() -> Outcome {
    SOUNDNESS.with(|s| {
        let s = s.borrow();
        ensure(s.checked > 0, || "no positive verdicts were produced".into())?;
        ensure(s.failures.is_empty(), || s.failures.join(" | "))?;
        Ok(format!("{} positive verdicts verified", s.checked))
    })
}

/// Conjugators for the equivariance check use one nonlinear elementary map.
fn equivariance() -> Outcome {
    let t = Instant::now();
    let (x, k) = example(F2, G2);
    let caps = SampleCaps::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for i in 0..25 {
        let sigma = random_tame(&mut rng, &xyz(), caps);
        let xs = conjugate(&x, &sigma.forward, &sigma.inverse).map_err(|e| e.to_string())?;
        let ks = KernelPair {
            f: sigma.apply(&k.f),
            g: sigma.apply(&k.g),
        };
        let c = plinth_generator(&xs, &ks, LndBounds::default()).map_err(|e| format!("sigma #{i}: {e}"))?;
        ensure(c.c_xyz.is_associate(&ks.f), || format!("sigma #{i}: plinth {}", c.c_xyz))?;
    }
    Ok(format!("25 conjugates in {:?}", t.elapsed()))
}

fn non_uniqueness() -> Outcome {
    let t = Instant::now();
    let (x, k) = example(F2, G2);
    let r = triangulate(&x, Some(&k), &TriangulateOptions::default()).map_err(|e| e.to_string())?;
    let form = r.form.ok_or("no form for example 2")?;
    let up = VarSet::of(&["u", "p"]);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for i in 0..10 {
        let terms = rng.gen_range(1..=4);
        let rr = random_polynomial(&mut rng, &up, &[0, 1], 2, terms, 5);
        let alt = alternate_form(&x, &form, &rr)
            .map_err(|e| e.to_string())?
            .ok_or_else(|| format!("r #{i} = {rr}: no completion"))?;
        let check = verify_alternate(&x, &form, &alt);
        ensure(record(check, &format!("alternate #{i}")), || format!("r #{i} = {rr}: unverified"))?;
    }
    Ok(format!("10 alternate systems verified in {:?}", t.elapsed()))
}

// ---- infrastructure oracles ----

fn gb_membership(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let v = xyz();
    let grlex = MonomialOrder::grlex(&["x", "y", "z"]);
    for i in 0..200 {
        // generators vanish at a rational point, so the ideal is proper
        let point: Vec<Rational> = (0..3).map(|_| Rational::from_integer(rng.gen_range(-2..=2).into())).collect();
        let ngens = rng.gen_range(1..=3);
        let gens: Vec<Polynomial> = (0..ngens)
            .map(|_| loop {
                let t = rng.gen_range(1..=3);
                let g = random_polynomial(rng, &v, &[0, 1, 2], 2, t, 4);
                let g = &g - &Polynomial::constant(&v, g.eval(&point));
                if !g.is_zero() {
                    break g;
                }
            })
            .collect();
        let member = gens.iter().fold(Polynomial::zero(&v), |acc, g| {
            let t = rng.gen_range(1..=2);
            &acc + &(&random_polynomial(rng, &v, &[0, 1, 2], 1, t, 3) * g)
        });
        let offset = Rational::from_integer(rng.gen_range(1..=5).into());
        let outsider = &member + &Polynomial::constant(&v, offset);
        let gb = buchberger(&gens, &grlex).map_err(|e| e.to_string())?;
        let truth_in = gb.contains(&member).map_err(|e| e.to_string())?;
        let truth_out = gb.contains(&outsider).map_err(|e| e.to_string())?;
        ensure(truth_in && !truth_out, || {
            format!("ideal #{i}: member {truth_in}, outsider {truth_out}")
        })?;
    }
    Ok(())
}

fn integer_divisors(n: &num_bigint::BigInt) -> Vec<num_bigint::BigInt> {
    let n = n.abs();
    let mut out = Vec::new();
    let mut d = num_bigint::BigInt::one();
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            out.push(d.clone());
            out.push(-d.clone());
            let e = &n / &d;
            if e != d {
                out.push(e.clone());
                out.push(-e);
            }
        }
        d += 1;
    }
    out
}

fn lagrange(xs: &[Rational], ys: &[Rational]) -> UniPoly {
    let mut out = UniPoly::zero();
    for (i, (xi, yi)) in xs.iter().zip(ys).enumerate() {
        let mut basis = UniPoly::constant(yi.clone());
        for (j, xj) in xs.iter().enumerate() {
            if i != j {
                let lin = UniPoly::new(vec![-xj.clone(), Rational::one()]);
                basis = mul_uni(&basis, &lin).scale(&(Rational::one() / (xi - xj)));
            }
        }
        out = add_uni(&out, &basis);
    }
    out
}

fn mul_uni(a: &UniPoly, b: &UniPoly) -> UniPoly {
    let mut c = vec![Rational::zero(); a.coeffs().len() + b.coeffs().len()];
    for (i, x) in a.coeffs().iter().enumerate() {
        for (j, y) in b.coeffs().iter().enumerate() {
            c[i + j] += x * y;
        }
    }
    UniPoly::new(c)
}

fn add_uni(a: &UniPoly, b: &UniPoly) -> UniPoly {
    let n = a.coeffs().len().max(b.coeffs().len());
    UniPoly::new((0..n).map(|i| a.coeff(i) + b.coeff(i)).collect())
}

/// Kronecker's method: searches every integer factor of degree `1..=deg/2`
/// through its values at `d + 1` points.
fn kronecker_irreducible(f: &UniPoly) -> bool {
    let n = f.degree();
    if n <= 1 {
        return n == 1;
    }
    let ints = UniPoly::from_bigints(&f.primitive_integer());
    let mut points: Vec<(num_bigint::BigInt, Rational)> = Vec::new();
    for k in -8i64..=8 {
        let x = Rational::from_integer(k.into());
        let y = ints.eval(&x);
        if y.is_zero() {
            return false;
        }
        points.push((y.to_integer().abs(), x));
    }
    points.sort();
    for d in 1..=n / 2 {
        let chosen = &points[..=d];
        let xs: Vec<Rational> = chosen.iter().map(|(_, x)| x.clone()).collect();
        let divisors: Vec<Vec<num_bigint::BigInt>> = chosen.iter().map(|(y, _)| integer_divisors(y)).collect();
        let mut idx = vec![0usize; d + 1];
        loop {
            let ys: Vec<Rational> = idx.iter().zip(&divisors).map(|(&i, ds)| Rational::from_integer(ds[i].clone())).collect();
            let g = lagrange(&xs, &ys);
            if g.degree() == d && !g.is_zero() && ints.rem(&g).is_zero() {
                return false;
            }
            let mut pos = 0;
            loop {
                if pos == idx.len() {
                    break;
                }
                idx[pos] += 1;
                if idx[pos] < divisors[pos].len() {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
            if pos == idx.len() {
                break;
            }
        }
    }
    true
}

/// Irreducibility over Q of a bivariate factor via an irreducible
/// specialization that keeps the degree and has no content.
fn bivariate_irreducible(f: &Polynomial) -> bool {
    let v = f.vars().clone();
    let involved: Vec<usize> = (0..v.len()).filter(|&i| f.involves(i)).collect();
    if involved.len() <= 1 {
        let i = involved.first().copied().unwrap_or(0);
        return UniPoly::from_polynomial(f, i).is_some_and(|u| kronecker_irreducible(&u));
    }
    let (main, other) = (0, 1);
    let content = lnd_core::poly::gcd_many(f.coefficients_in(main).iter().filter(|c| !c.is_zero()));
    if !content.is_some_and(|c| c.is_constant()) {
        return false;
    }
    let deg = f.degree_in(main);
    (2i64..40).any(|k| {
        let mut images = vec![Polynomial::var_at(&v, 0), Polynomial::var_at(&v, 1)];
        images[other] = Polynomial::from_int(&v, k);
        let s = f.compose(&images, &v);
        s.degree_in(main) == deg
            && UniPoly::from_polynomial(&s, main).is_some_and(|u| kronecker_irreducible(&u))
    })
}

fn check_factorization(p: &Polynomial, fz: &Factorization, bivariate: bool) -> Result<(), String> {
    ensure(fz.expand(p.vars()) == *p, || format!("{p} does not reassemble"))?;
    for (q, _) in &fz.factors {
        ensure(q.total_degree().unwrap_or(0) <= 4, || format!("factor {q} of {p} above degree 4"))?;
        let irreducible = if bivariate {
            bivariate_irreducible(q)
        } else {
            UniPoly::from_polynomial(q, 0).is_some_and(|u| kronecker_irreducible(&u))
        };
        ensure(irreducible, || format!("factor {q} of {p} is reducible"))?;
    }
    Ok(())
}

fn factorization(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let uni = VarSet::of(&["x"]);
    let bi = VarSet::of(&["x", "y"]);
    for i in 0..200 {
        let bivariate = i % 2 == 1;
        let (v, allowed, deg): (&VarSet, &[usize], u32) = if bivariate { (&bi, &[0, 1], 2) } else { (&uni, &[0], 4) };
        let count = rng.gen_range(1..=3);
        let mut prod = Polynomial::one(v);
        for _ in 0..count {
            let f = loop {
                let t = rng.gen_range(1..=4);
                let f = random_polynomial(rng, v, allowed, deg, t, 5);
                if f.total_degree().unwrap_or(0) >= 1 {
                    break f;
                }
            };
            prod = &prod * &f;
        }
        let fz = factor(&prod).map_err(|e| format!("{prod}: {e}"))?;
        check_factorization(&prod, &fz, bivariate)?;
    }
    Ok(())
}

fn nonconstant(rng: &mut ChaCha8Rng, v: &VarSet, deg: u32) -> Polynomial {
    loop {
        let t = rng.gen_range(1..=3);
        let h = random_polynomial(rng, v, &[0, 1], deg, t, 4);
        if h.total_degree().unwrap_or(0) >= 1 {
            return h;
        }
    }
}

/// No `C = ell(h)` with `deg ell = k >= 2`: `ell'(h)`, of degree
/// `n - n/k`, would divide both partials.
fn certified_undecomposable(c: &Polynomial) -> bool {
    let n = c.total_degree().unwrap_or(0);
    let g = gcd(&c.derivative(0), &c.derivative(1)).expect("same ring");
    let dg = g.total_degree().unwrap_or(0);
    (2..=n).filter(|k| n % k == 0).all(|k| dg < n - n / k)
}

fn decomposition(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let fg = VarSet::of(&["F", "G"]);
    for i in 0..100 {
        let k = rng.gen_range(2..=3);
        let mut coeffs: Vec<Rational> = (0..=k).map(|_| Rational::from_integer(rng.gen_range(-4..=4).into())).collect();
        if coeffs[k].is_zero() {
            coeffs[k] = Rational::one();
        }
        let ell = UniPoly::new(coeffs);
        let h = nonconstant(rng, &fg, 2);
        let c = ell.eval_poly(&h);
        let d = uni_multivariate_decompose(&c).map_err(|e| format!("composed #{i}: {e}"))?;
        ensure(d.reassemble() == c, || format!("composed #{i}: {c} does not reassemble"))?;
        ensure(d.degree() >= k && d.degree() % k == 0, || {
            format!("composed #{i}: ell of degree {} for {c} = ell_{k}(h)", d.degree())
        })?;
    }
    let mut certified = 0;
    let mut attempts = 0;
    while certified < 100 {
        attempts += 1;
        ensure(attempts < 1000, || "too few certifiable products".into())?;
        let c = &nonconstant(rng, &fg, 2) * &nonconstant(rng, &fg, 2);
        let d = uni_multivariate_decompose(&c).map_err(|e| format!("product {c}: {e}"))?;
        ensure(d.reassemble() == c, || format!("product {c} does not reassemble"))?;
        if certified_undecomposable(&c) {
            ensure(d.is_trivial(), || format!("product {c} reported decomposable"))?;
            certified += 1;
        }
    }
    Ok(())
}

fn oracles() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    gb_membership(&mut rng).map_err(|e| format!("membership: {e}"))?;
    factorization(&mut rng).map_err(|e| format!("factorization: {e}"))?;
    decomposition(&mut rng).map_err(|e| format!("decomposition: {e}"))?;
    Ok(format!("membership, factorization and decomposition oracles in {:?}", t.elapsed()))
}

fn report(n: u8, name: &str, outcome: &Outcome) -> bool {
    match outcome {
        Ok(detail) => println!("criterion {n} PASS {name}: {detail}"),
        Err(why) => println!("criterion {n} FAIL {name}: {why}"),
    }
    outcome.is_ok()
}

/// Numeric arguments restrict the run to those criteria.
fn main() {
    let only: Vec<u8> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let wanted = |n: u8| only.is_empty() || only.contains(&n);
    let mut ok = true;
    let mut step = |n: u8, name: &str, outcome: Option<Outcome>| {
        if let Some(o) = outcome {
            ok &= report(n, name, &o);
        }
    };
    let run = |n: u8, f: fn() -> Outcome| wanted(n).then(f);
    step(1, "example 1 end to end", run(1, example1));
    step(2, "example 2 end to end", run(2, example2));
    step(3, "construction closure", run(3, closure));
    // runs before the soundness line so its forms are counted there
    let alternates = run(6, non_uniqueness);
    step(4, "soundness", run(4, soundness));
    step(5, "plinth equivariance", run(5, equivariance));
    step(6, "non-uniqueness of v", alternates);
    step(7, "infrastructure oracles", run(7, oracles));
    if !ok {
        std::process::exit(1);
    }
}
