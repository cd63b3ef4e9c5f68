//! Exact symbolic algebra for gwis expressions: products of correlator brackets
//! `<...>_g` representing decorated boundary strata, with coefficients that are exact
//! rationals or rational-linear forms in unknowns `c1..c30`.
//!
//! The crate also embeds the 30 codimension-3 basis strata of M̄_{3,1}, the 49 linear
//! constraints on their coefficients, and an exact solver that checks the resulting
//! tautological relation.

pub mod cli;
pub mod data;
pub mod expr;
pub mod linsys;
pub mod parse;
pub mod print;
pub mod scalar;
pub mod strata;
pub mod term;

pub use expr::Expression;
pub use parse::{parse_expression, parse_term, ParseError};
pub use print::{print, Format};
pub use scalar::{Assignment, Rational, Scalar, Unknown};
pub use term::{Correlator, Insertion, Label, Term, Violation};
