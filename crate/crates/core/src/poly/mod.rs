//! Exact polynomial arithmetic over the rationals.

mod crt;
mod factor;
mod forms;
mod gcd;
mod parse;
mod polynomial;
mod univariate;
mod varset;
pub(crate) mod zp;

pub use crt::{crt_uni, crt_univariate};
pub use factor::{
    factor, factor_bivariate, factor_integer_squarefree, factor_univariate, squarefree_part,
    Factorization,
};
pub use forms::{form_kth_root, rational_root};
pub use gcd::{
    content_in, divides, exact_divide, gcd, gcd_many, gcd_with_content, primitive_in,
    pseudo_remainder,
};
pub use parse::{parse, ParseError};
pub use polynomial::{grlex_cmp, Exponents, Polynomial};
pub use univariate::UniPoly;
pub use varset::VarSet;


/// Arbitrary-precision rational numbers, always reduced.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("`{0}` is not a valid variable name")]
    BadVariableName(String),
    #[error("variable `{0}` declared twice")]
    DuplicateVariable(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("variable sets {left} and {right} are incompatible")]
    VarSetMismatch { left: String, right: String },
    #[error("division by zero")]
    DivisionByZero,
    #[error("division is not exact")]
    NotDivisible,
    #[error("gcd of two zero polynomials")]
    ZeroGcd,
    #[error("zero polynomial where a nonzero one is required")]
    ZeroInput,
    #[error("moduli are not pairwise coprime")]
    NonCoprimeModuli,
    #[error("unsupported: {0}")]
    Unsupported(String),
}
