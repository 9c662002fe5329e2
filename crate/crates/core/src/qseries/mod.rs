//! Exact truncated Laurent/power series in `q`, curve classes `t`, `u` and
//! `y^{1/2}`.
//!
//! A [`Series`] carries a [`Cutoff`] box; binary operations work in the
//! intersection of the operands' boxes. Coefficients are exact rationals
//! throughout.

mod cutoff;
mod functions;
mod json;
mod monomial;
mod series;

pub use cutoff::Cutoff;
pub use functions::{
    exp, factor_power, inverse, log, log1p, product, product_power, sin_halfangle_power,
};
pub use monomial::{Monomial, Var};
pub use series::Series;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QSeriesError {
    #[error("series has no invertible leading monomial")]
    ZeroLeadingTerm,
    #[error("series has a nonzero constant term")]
    NonzeroConstantTerm,
    #[error("cannot rescale a variable by zero")]
    ZeroScale,
    #[error("monomial {monomial} lies outside the cutoff box")]
    OutOfCutoff { monomial: String },
    #[error("powers of the argument do not leave the cutoff box")]
    NotNilpotent,
}
