//! Locally nilpotent derivations of `Q[x,y,z]`: plinth ideals, rank and
//! triangulability.

pub mod derivation;
pub mod groebner;
pub mod slices;
pub mod triangulate;
pub mod poly;
pub mod rank;
pub mod samples;

pub use poly::{parse, Polynomial, Rational, UniPoly, VarSet};
