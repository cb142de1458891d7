//! Error type shared by every module in the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoreError {
    /// A CDF evaluated to a non-finite value, or a construction-time
    /// parameter was outside its domain.
    #[error("invalid distribution: {what} (x = {x})")]
    InvalidDistribution { what: String, x: f64 },

    #[error("invalid parameter {name}={value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid transform: {0}")]
    InvalidTransform(String),

    /// A scanned function returned NaN or infinity at `x`.
    #[error("evaluation failed in {context} at x = {x}")]
    Evaluation { context: &'static str, x: f64 },

    /// Quadrature refinement did not converge; carries the last two estimates.
    #[error("quadrature did not reach target accuracy: last = {last}, previous = {prev}")]
    Accuracy { last: f64, prev: f64 },

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("cannot parse distribution spec `{spec}`: {reason}")]
    SpecParse { spec: String, reason: String },

    #[error("cannot read distribution table: {0}")]
    Table(String),

    /// Operation precondition not met in a way that is an error rather
    /// than a `not_applicable` verdict (e.g. negative support where a
    /// nonnegative variable is required).
    #[error("unsupported operation: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
