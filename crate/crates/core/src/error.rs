use thiserror::Error;

use crate::shift::ShiftSearchStats;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A value failed structural validation (e.g. not a fundamental discriminant).
    #[error("validation error: {0}")]
    Validation(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// The request exceeds a configured memory or work budget.
    #[error("resource error: {0}")]
    Resource(String),

    #[error("numeric error: {message} (achieved error estimate {achieved:e})")]
    Numeric { message: String, achieved: f64 },

    /// One of the hypotheses of the M_k bound does not hold for the chosen parameters.
    #[error("precondition failed: {inequality} does not hold ({detail})")]
    Precondition { inequality: &'static str, detail: String },

    #[error("no residue class mod {prime} avoids every -h_i; no coprime shift exists")]
    NoCoprimeShift { prime: u64 },

    #[error("no shift with every character value -1 (scanned y = 1..={}, H = {}, all-minus-one count = {})", .0.g, .0.h, .0.all_minus_one_count)]
    ShiftNotFound(Box<ShiftSearchStats>),

    #[error("not supported: {0}")]
    NotSupported(String),

    #[error("threshold not met: M_k evidence {evidence} <= required {threshold}")]
    ThresholdNotMet { evidence: f64, threshold: f64 },

    #[error("certificate rejected: {0}")]
    Certificate(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
