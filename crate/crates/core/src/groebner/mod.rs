//! Groebner bases: reduced bases, normal forms, elimination, and the
//! intersection of an ideal with a subalgebra given by tagged generators.

mod engine;
mod order;

use engine::{groebner, reduce, IPoly};
pub use order::{Block, BlockKind, MonomialOrder};
use order::Layout;

use crate::poly::{Exponents, PolyError, Polynomial, Rational, VarSet};

/// A reduced Groebner basis: monic generators sorted by leading monomial,
/// ascending.
#[derive(Clone, Debug)]
pub struct GroebnerBasis {
    pub generators: Vec<Polynomial>,
    pub order: MonomialOrder,
    pub reduced: bool,
    vars: VarSet,
    layout: Layout,
    internal: Vec<IPoly>,
}

impl PartialEq for GroebnerBasis {
    fn eq(&self, other: &Self) -> bool {
        self.vars == other.vars && self.order == other.order && self.generators == other.generators
    }
}

impl GroebnerBasis {
    fn from_internal(internal: Vec<IPoly>, vars: &VarSet, order: &MonomialOrder, layout: Layout) -> Self {
        let generators = internal
            .iter()
            .map(|g| g.to_polynomial(vars, &layout, true))
            .collect();
        GroebnerBasis {
            generators,
            order: order.clone(),
            reduced: true,
            vars: vars.clone(),
            layout,
            internal,
        }
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// `true` for the whole ring.
    pub fn is_unit(&self) -> bool {
        self.generators.len() == 1 && self.generators[0].is_constant()
    }

    /// Leading exponent vector of `p` under this basis's order.
    pub fn leading_monomial(&self, p: &Polynomial) -> Option<Exponents> {
        let p = p.embed(&self.vars).ok()?;
        p.terms()
            .map(|(e, _)| self.layout.key(e))
            .max()
            .map(|k| self.layout.exponents(&k))
    }

    /// Unique remainder of `p`; zero iff `p` lies in the ideal.
    pub fn normal_form(&self, p: &Polynomial) -> Result<Polynomial, PolyError> {
        let p = p.embed(&self.vars)?;
        if p.is_zero() {
            return Ok(p);
        }
        let ip = IPoly::from_polynomial(&p, &self.layout);
        // p = ratio * ip
        let (e0, c0) = p.terms().next().unwrap();
        let k0 = self.layout.key(e0);
        let i0 = &ip.terms.iter().find(|(k, _)| *k == k0).unwrap().1;
        let ratio = c0 / Rational::from_integer(i0.clone());
        let basis: Vec<&IPoly> = self.internal.iter().collect();
        let (r, lambda) = reduce(&ip, &basis, true);
        Ok(r.to_polynomial(&self.vars, &self.layout, false).scale(&(ratio / lambda)))
    }

    pub fn contains(&self, p: &Polynomial) -> Result<bool, PolyError> {
        Ok(self.normal_form(p)?.is_zero())
    }
}

/// Reduced Groebner basis of the ideal generated by `gens`.
pub fn buchberger(gens: &[Polynomial], order: &MonomialOrder) -> Result<GroebnerBasis, PolyError> {
    let mut vars = gens
        .iter()
        .fold(VarSet::empty(), |acc, g| acc.union(g.vars()));
    for v in order.variables() {
        if !vars.contains(v) {
            vars = vars.union(&VarSet::new([v])?);
        }
    }
    buchberger_over(gens, &vars, order)
}

/// Like [`buchberger`] with an explicit ambient variable set.
pub fn buchberger_over(
    gens: &[Polynomial],
    vars: &VarSet,
    order: &MonomialOrder,
) -> Result<GroebnerBasis, PolyError> {
    let layout = order.layout(vars)?;
    let internal = gens
        .iter()
        .map(|g| Ok(IPoly::from_polynomial(&g.embed(vars)?, &layout)))
        .collect::<Result<Vec<_>, PolyError>>()?;
    let basis = groebner(internal, &layout);
    Ok(GroebnerBasis::from_internal(basis, vars, order, layout))
}

pub fn normal_form(p: &Polynomial, gb: &GroebnerBasis) -> Result<Polynomial, PolyError> {
    gb.normal_form(p)
}

/// Reduced basis of `(gens) ∩ K[kept]`, where `kept` is everything not in
/// `drop`, under `kept_order` (graded lex in varset order by default).
pub fn eliminate(
    gens: &[Polynomial],
    drop: &[&str],
    kept_order: Option<&MonomialOrder>,
) -> Result<GroebnerBasis, PolyError> {
    let vars = gens
        .iter()
        .fold(VarSet::empty(), |acc, g| acc.union(g.vars()));
    for d in drop {
        if !vars.contains(d) {
            return Err(PolyError::UnknownVariable(d.to_string()));
        }
    }
    let kept_names: Vec<&str> = vars
        .names()
        .iter()
        .map(String::as_str)
        .filter(|n| !drop.contains(n))
        .collect();
    if kept_names.is_empty() {
        return Err(PolyError::Unsupported("nothing left after elimination".into()));
    }
    let kept = VarSet::of(&kept_names);
    let inner = kept_order
        .cloned()
        .unwrap_or_else(|| MonomialOrder::grlex(&kept_names));
    let order = MonomialOrder::block(MonomialOrder::grlex(drop), inner.clone());
    let full = buchberger_over(gens, &vars, &order)?;
    restrict(&full, &kept, &inner)
}

fn restrict(full: &GroebnerBasis, kept: &VarSet, order: &MonomialOrder) -> Result<GroebnerBasis, PolyError> {
    let layout = order.layout(kept)?;
    let internal = full
        .generators
        .iter()
        .filter_map(|g| g.embed(kept).ok())
        .map(|g| IPoly::from_polynomial(&g, &layout))
        .collect();
    Ok(GroebnerBasis::from_internal(internal, kept, order, layout))
}

/// The ideal `(q, T_1 - g_1, ..., T_m - g_m)` under an order ranking the
/// original variables above every tag. Its trace on the tags is the set of
/// relations `H(T)` with `H(g) ∈ (q)`.
#[derive(Clone, Debug)]
pub struct SubalgebraIdeal {
    full: GroebnerBasis,
    tags: VarSet,
    inner: MonomialOrder,
}

impl SubalgebraIdeal {
    /// `modulus` may be written in the original variables, in the tags, or
    /// both; `None` means the zero ideal.
    pub fn new(
        modulus: Option<&Polynomial>,
        tags: &[(&str, Polynomial)],
        inner: &MonomialOrder,
    ) -> Result<Self, PolyError> {
        let names: Vec<&str> = tags.iter().map(|(n, _)| *n).collect();
        let tag_vars = VarSet::new(names.iter().copied())?;
        let mut base_names: Vec<String> = Vec::new();
        for g in tags.iter().map(|(_, g)| g).chain(modulus) {
            for (i, n) in g.vars().names().iter().enumerate() {
                if tag_vars.contains(n) {
                    if g.involves(i) && !modulus.is_some_and(|q| std::ptr::eq(q, g)) {
                        return Err(PolyError::DuplicateVariable(n.clone()));
                    }
                } else if !base_names.contains(n) {
                    base_names.push(n.clone());
                }
            }
        }
        let base = VarSet::new(base_names)?;
        let all = base.union(&tag_vars);

        let mut gens = Vec::with_capacity(tags.len() + 1);
        if let Some(q) = modulus {
            gens.push(q.embed(&all)?);
        }
        for (name, g) in tags {
            let t = Polynomial::var(&all, name)?;
            gens.push(&t - &g.embed(&all)?);
        }
        let base_refs: Vec<&str> = base.names().iter().map(String::as_str).collect();
        let order = MonomialOrder::block(MonomialOrder::grlex(&base_refs), inner.clone());
        let full = buchberger_over(&gens, &all, &order)?;
        Ok(SubalgebraIdeal {
            full,
            tags: tag_vars,
            inner: inner.clone(),
        })
    }

    pub fn tags(&self) -> &VarSet {
        &self.tags
    }

    /// The full basis over original variables and tags.
    pub fn basis(&self) -> &GroebnerBasis {
        &self.full
    }

    /// Reduced basis, in the tag variables, of the relations `H` with
    /// `H(g) ∈ (q)`.
    pub fn intersection(&self) -> Result<GroebnerBasis, PolyError> {
        restrict(&self.full, &self.tags, &self.inner)
    }

    /// `H` over the tags with `h - H(g) ∈ (q)`, if one exists.
    pub fn member(&self, h: &Polynomial) -> Result<Option<Polynomial>, PolyError> {
        let nf = self.full.normal_form(h)?;
        Ok(nf.embed(&self.tags).ok())
    }
}

/// Reduced basis of `{H(T) : H(g) ∈ qK[x]}` under `inner_order` on the tags.
pub fn intersect_subalgebra(
    q: &Polynomial,
    tags: &[(&str, Polynomial)],
    inner_order: &MonomialOrder,
) -> Result<GroebnerBasis, PolyError> {
    SubalgebraIdeal::new(Some(q), tags, inner_order)?.intersection()
}

/// `H` with `h - H(g) ∈ (modulus)` (exact equality without a modulus).
pub fn subalgebra_membership(
    h: &Polynomial,
    tags: &[(&str, Polynomial)],
    modulus: Option<&Polynomial>,
) -> Result<Option<Polynomial>, PolyError> {
    let names: Vec<&str> = tags.iter().map(|(n, _)| *n).collect();
    SubalgebraIdeal::new(modulus, tags, &MonomialOrder::grlex(&names))?.member(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse;

    fn xyz(s: &str) -> Polynomial {
        parse(s, &VarSet::of(&["x", "y", "z"])).unwrap()
    }

    #[test]
    fn small_bases() {
        let lex = MonomialOrder::lex(&["x", "y"]);
        let v = VarSet::of(&["x", "y"]);
        let p = |s: &str| parse(s, &v).unwrap();
        assert_eq!(buchberger(&[p("x")], &lex).unwrap().generators, vec![p("x")]);
        assert_eq!(
            buchberger(&[p("x-1"), p("y-x")], &lex).unwrap().generators,
            vec![p("y-1"), p("x-1")]
        );
        let gb = buchberger(&[p("x^2+y^2"), p("x*y")], &lex).unwrap();
        assert!(gb.generators.contains(&p("y^3")));
        assert!(gb.contains(&p("y^3")).unwrap());
    }

    #[test]
    fn normal_forms() {
        let gb = buchberger(&[xyz("x")], &MonomialOrder::lex(&["x", "y", "z"])).unwrap();
        assert_eq!(gb.normal_form(&xyz("x^2")).unwrap(), xyz("0"));
        assert_eq!(gb.normal_form(&xyz("x+y")).unwrap(), xyz("y"));
        assert_eq!(gb.normal_form(&xyz("3*x+2/3*y")).unwrap(), xyz("2/3*y"));
    }

    #[test]
    fn elimination() {
        let v = VarSet::of(&["t", "x", "y"]);
        let p = |s: &str| parse(s, &v).unwrap();
        let kept = VarSet::of(&["x", "y"]);
        let e = eliminate(&[p("t*x-1"), p("t*y")], &["t"], None).unwrap();
        assert_eq!(e.generators, vec![parse("y", &kept).unwrap()]);

        let v2 = VarSet::of(&["x", "y"]);
        let e = eliminate(&[parse("y-x^2", &v2).unwrap()], &["y"], None).unwrap();
        assert!(e.is_empty());

        let v3 = VarSet::of(&["x", "U", "V"]);
        let p3 = |s: &str| parse(s, &v3).unwrap();
        let e = eliminate(&[p3("U-x"), p3("V-x^2")], &["x"], None).unwrap();
        let uv = VarSet::of(&["U", "V"]);
        assert_eq!(e.generators, vec![parse("U^2-V", &uv).unwrap()]);
    }

    #[test]
    fn membership_examples() {
        let f = VarSet::of(&["F"]);
        assert_eq!(
            subalgebra_membership(&xyz("x^2"), &[("F", xyz("x"))], None).unwrap(),
            Some(parse("F^2", &f).unwrap())
        );
        assert_eq!(
            subalgebra_membership(
                &xyz("y"),
                &[("F", xyz("x")), ("G", xyz("2*x*z-y^2"))],
                Some(&xyz("x"))
            )
            .unwrap(),
            None
        );
        let fg = VarSet::of(&["F", "G"]);
        assert_eq!(
            subalgebra_membership(&xyz("y+x*z"), &[("F", xyz("x")), ("G", xyz("y+x*z"))], None)
                .unwrap(),
            Some(parse("G", &fg).unwrap())
        );
    }

    #[test]
    fn intersect_with_principal_ideal() {
        let tags = [("X", xyz("x")), ("Y", xyz("y"))];
        let gb = intersect_subalgebra(&xyz("x"), &tags, &MonomialOrder::lex(&["Y", "X"])).unwrap();
        assert_eq!(gb.generators, vec![parse("X", &VarSet::of(&["X", "Y"])).unwrap()]);
    }
}
