use thiserror::Error;

use crate::flow::RunResult;

/// Errors produced by the solver library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("grid needs at least 3 nodes, got {0}")]
    TooFewNodes(usize),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("field is identically zero")]
    DegenerateField,

    #[error("regime violation: {0}")]
    Regime(String),

    #[error("trace too sparse: {0}")]
    SparseTrace(String),

    #[error("wrong scheme: {0}")]
    WrongScheme(String),

    #[error("bracket [{lo}, {hi}] does not straddle the decaying profile ({detail})")]
    BadBracket { lo: f64, hi: f64, detail: String },

    #[error("profile tail too large: |Q(R_max)|/Q(0) = {ratio:.3e} at R_max = {r_max}; {guidance}")]
    TailNotResolved {
        ratio: f64,
        r_max: f64,
        guidance: String,
    },

    #[error("did not converge after {iterations} iterations (residual {residual:.3e})")]
    NotConverged {
        iterations: usize,
        residual: f64,
        trace: Option<Box<RunResult>>,
    },

    #[error("non-finite values encountered: {0}")]
    Diverged(String),
}

/// Coarse error classes, used by front ends to choose exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Usage,
    Precondition,
    Numerical,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::InvalidGeometry(_)
            | Error::TooFewNodes(_)
            | Error::LengthMismatch { .. }
            | Error::InvalidParameter { .. } => ErrorClass::Usage,
            Error::DegenerateField
            | Error::Regime(_)
            | Error::SparseTrace(_)
            | Error::WrongScheme(_)
            | Error::BadBracket { .. } => ErrorClass::Precondition,
            Error::TailNotResolved { .. } | Error::NotConverged { .. } | Error::Diverged(_) => {
                ErrorClass::Numerical
            }
        }
    }

    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
