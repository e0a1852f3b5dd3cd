//! Exact-arithmetic toolkit for integrality phenomena of P-recursive
//! sequences.
//!
//! The crate is layered bottom-up:
//!
//! - [`numeric`]: big rationals, binomials, `lcm(1..n)`, 2-adic valuation
//! - [`poly`]: sparse multivariate polynomials and univariate polynomials over them
//! - [`series`]: truncated power series, differential operators, identity checks
//! - [`sequences`]: the `w`/`u` parameter sequences, the Apéry numbers and their
//!   mutual transformations
//! - [`brackets`]: the lattice bracket polynomials and the bracket expansion of
//!   odd-form recurrences
//! - [`speclang`]: the recurrence description language
//! - [`certify`]: integrality reports
//! - [`cli`]: the `integrality` command-line front end

pub mod error;
pub mod brackets;
pub mod certify;
pub mod cli;
pub mod expr;
pub mod numeric;
pub mod poly;
pub mod report;
pub mod sequences;
pub mod series;
pub mod speclang;

pub use error::{Error, Result};
pub use numeric::Rational;
pub use poly::{DenomProfile, MultiPoly, UPoly, VarSet};
