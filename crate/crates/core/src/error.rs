use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Probability mass pushed outside the truncated Fock space exceeds the cutoff tolerance.
    #[error("cutoff overflow: truncated tail mass {tail:.3e} exceeds tolerance {tol:.3e} at n_max = {n_max}")]
    CutoffOverflow { n_max: usize, tail: f64, tol: f64 },

    #[error("invalid cutoff: {0}")]
    InvalidCutoff(String),

    #[error("invalid probe: {0}")]
    InvalidProbe(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A pure-state formula was handed a mixed state or mixed probe.
    #[error("operation requires a pure state")]
    MixedState,

    #[error("degenerate probability {p}: outcome distribution carries no information")]
    DegenerateProbability { p: f64 },

    #[error("no root: observed frequency {freq} outside [{lo}, {hi}] on the bracket")]
    NoRoot { freq: f64, lo: f64, hi: f64 },

    #[error("insufficient repetitions: {0}")]
    InsufficientReps(String),
}
