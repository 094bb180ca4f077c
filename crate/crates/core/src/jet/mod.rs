//! Exact jet arithmetic: rational multivariate polynomials and truncated
//! power series with parameter-polynomial coefficients.

mod poly;
mod series;

use thiserror::Error;

pub use poly::{int, rat, MPoly, Rational};
pub use series::{poly_eval_along, ArithOp, Order, ParamScalar, TruncSeries};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("parameter arity mismatch: {left} vs {right}")]
    ArityMismatch { left: usize, right: usize },
    #[error("polynomial expects {expected} coordinates, branch has {found}")]
    CoordinateMismatch { expected: usize, found: usize },
    #[error("division by a series that vanishes up to its truncation order")]
    ZeroDivisor,
    #[error("quotient is not a power series with polynomial coefficients (fails at t^{exponent})")]
    NotDivisible { exponent: u32 },
}
