//! Error taxonomy shared by every module.

use crate::fitting::FitResult;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An argument lies outside the physical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The inputs do not specify a complete model.
    #[error("configuration error: {0}")]
    Config(String),

    /// Evaluation lands exactly on a pole of the model.
    #[error("singularity: {0}")]
    Singularity(String),

    /// The operating point is at or beyond parametric self-oscillation.
    /// `margin` is the signed threshold ratio; zero marks the boundary.
    #[error("above self-oscillation threshold (margin {margin:.3e})")]
    AboveThreshold { margin: f64 },

    /// A root search was given an interval with no sign change.
    #[error("bracketing error: {0}")]
    Bracketing(String),

    /// A feature (peak, crossing) could not be located in the data.
    #[error("extraction error: {0}")]
    Extraction(String),

    /// No pump phase aligns the amplified quadrature for these parameters.
    #[error("alignment error: {0}")]
    Alignment(String),

    /// The detection chain cannot be aggregated (for example net gain <= 1).
    #[error("chain aggregation error: {0}")]
    Aggregation(String),

    /// Input data carry no usable signal (zero spread, too few points).
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// A fit failed to converge; `best` holds the best iterate found.
    #[error("fit error: {message}")]
    Fit {
        message: String,
        best: Option<Box<FitResult>>,
    },
}
