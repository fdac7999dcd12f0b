use thiserror::Error;

/// Errors produced anywhere in the library.
///
/// [`Error::is_usage`] separates bad input (malformed files, out-of-range
/// parameters) from numerical failures, which the CLI maps to different
/// exit codes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension k must be in 1..={max}, got {k}")]
    InvalidDimension { k: u32, max: u32 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("tail bound {tail_bound:e} still above tolerance {tail_tol:e} at the cap of {cap} terms (k = {k})")]
    TailNotConverged {
        k: u32,
        cap: usize,
        tail_tol: f64,
        tail_bound: f64,
    },

    #[error("series coefficient overflow at index {index}")]
    CoefficientOverflow { index: usize },

    #[error("degenerate target {0}: must be positive")]
    DegenerateTarget(f64),

    #[error("target unattainable: h reaches only {reached} below 0.999 x radius estimate {radius}, need {target}")]
    TargetUnattainable {
        target: f64,
        reached: f64,
        radius: f64,
    },

    #[error("truncation error {bound:e} of the inverse series at c = {c} exceeds {tol:e}")]
    TruncationTooCoarse { c: f64, bound: f64, tol: f64 },

    #[error("k too small for paper mode: a_0 - 2C/k = {margin} <= 0 (k = {k}, C = {c_const})")]
    KTooSmallForPaperMode { k: u32, c_const: f64, margin: f64 },

    #[error("input not a Gram matrix: {0}")]
    NotGram(String),

    #[error("kernel not PSD: minimum eigenvalue {min_eigenvalue:e}")]
    KernelNotPsd { min_eigenvalue: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("instance too large for exhaustive search: {0} enumerated signs, limit 24")]
    InstanceTooLarge(usize),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::InvalidDimension { .. }
                | Error::InvalidParameter { .. }
                | Error::DimensionMismatch(_)
                | Error::InstanceTooLarge(_)
                | Error::Parse(_)
                | Error::Io(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
