//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SkewflowError {
    #[error("time domain violation ({context}): t = {t}, s = {s}")]
    TimeDomain {
        t: f64,
        s: f64,
        context: &'static str,
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid base profile: {0}")]
    InvalidProfile(String),

    #[error("quadrature failed: non-finite sample {value} at tau = {location}")]
    Quadrature { location: f64, value: f64 },

    #[error("invalid rate constants: {0}")]
    InvalidConstants(String),

    #[error("inadmissible criterion function: {0}")]
    InvalidCriterion(String),

    #[error("empty sample grid: {0}")]
    EmptyGrid(&'static str),

    #[error("invalid projector family set: {0}")]
    InvalidFamilySet(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid system: {0}")]
    InvalidSystem(String),
}

pub type Result<T> = std::result::Result<T, SkewflowError>;
