use thiserror::Error;

/// Errors raised by curve construction, analysis and reduction.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degree mismatch: expected formal degree {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("vanishing order at {point} exceeds {cap}; cannot resolve singularity type")]
    Resolution { point: String, cap: usize },

    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("zero pivot `{entry}` (|value| = {magnitude:e})")]
    Pivot { entry: &'static str, magnitude: f64 },

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("quadrature did not converge: coarse {coarse}, fine {fine}, tolerance {tol:e}")]
    Accuracy { coarse: f64, fine: f64, tol: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
