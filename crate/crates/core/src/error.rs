use thiserror::Error;

/// Errors produced anywhere in the design pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    Dimension {
        context: &'static str,
        expected: String,
        found: String,
    },

    #[error("{context}: matrix must be square, got {rows}x{cols}")]
    NotSquare {
        context: &'static str,
        rows: usize,
        cols: usize,
    },

    #[error("{context}: matrix is not symmetric (max asymmetry {asymmetry:e})")]
    Asymmetric { context: &'static str, asymmetry: f64 },

    #[error("{context}: matrix is singular")]
    Singular { context: &'static str },

    #[error("resonant spectrum: Lyapunov operator is singular (two eigenvalues sum to zero)")]
    ResonantSpectrum,

    #[error("stability indeterminate: {0}")]
    Indeterminate(String),

    #[error("{context}: matrix is not positive definite")]
    NotPositiveDefinite { context: &'static str },

    #[error("stabilization failed: no stabilizing initial gain found after {attempts} attempts")]
    StabilizationFailed { attempts: usize },

    #[error("Newton-Kleinman iteration did not converge in {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("indefinite iterate at Newton step {iteration}")]
    IndefiniteIterate { iteration: usize },

    #[error("Riccati residual {residual:e} exceeds bound {bound:e}")]
    ResidualTooLarge { residual: f64, bound: f64 },

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("communication graph is not connected (node {unreachable} unreachable from node 1)")]
    Disconnected { unreachable: usize },

    #[error("inadmissible coupling scalar c = {c}: must satisfy 0 < c < {upper}")]
    InadmissibleCoupling { c: f64, upper: f64 },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("infinite cost: closed-loop matrix is not Hurwitz")]
    InfiniteCost,

    #[error("simulation diverged at t = {time}")]
    Divergence { time: f64 },

    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn dim_err(context: &'static str, expected: impl ToString, found: impl ToString) -> Error {
    Error::Dimension {
        context,
        expected: expected.to_string(),
        found: found.to_string(),
    }
}
