use thiserror::Error;

/// Errors produced across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("superposition indices must differ (got n = m = {0})")]
    EqualIndices(usize),

    #[error("superposition coefficient must be nonzero")]
    ZeroCoefficient,

    #[error("state vector norm is {0}, expected 1")]
    NotNormalized(f64),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("matrix is not square: {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },

    #[error("matrix asymmetry {asymmetry:.3e} exceeds Hermiticity tolerance {tol:.1e}")]
    NotHermitian { asymmetry: f64, tol: f64 },

    #[error("trace is {trace}, expected 1 within {tol:.1e}")]
    InvalidTrace { trace: f64, tol: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPositive(f64),

    #[error("rank {rank} invalid for dimension {dim}; need 1 <= rank <= dim")]
    InvalidRank { rank: usize, dim: usize },

    #[error("all eigenvalues clipped to zero; no physical state nearby")]
    ZeroTrace,

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("probe angles nearly degenerate: |sin(beta - alpha)| = {sine:.3e} < {tol:.1e}")]
    DegenerateAngles { sine: f64, tol: f64 },

    #[error("no expectation value recorded for {0}")]
    MissingExpectation(String),

    #[error("duplicate projector spec in plan: {0}")]
    DuplicateSpec(String),

    #[error("detector efficiency {0} outside (0, 1]")]
    InvalidEfficiency(f64),

    #[error("inversion amplification {amplification:.3e} exceeds bound {bound:.3e}")]
    IllConditioned { amplification: f64, bound: f64 },

    #[error("Fock cutoff {cutoff} too small: support reaches index {required}")]
    CutoffTooSmall { cutoff: usize, required: usize },

    #[error("beam-splitter amplitude product below tolerance for element ({row},{col})")]
    VanishingAmplitude { row: usize, col: usize },

    #[error("invalid shot count: must be >= 1")]
    InvalidShots,

    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for the CLI: 2 config, 3 numeric, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ConfigInvalid(_)
            | Error::InvalidShots
            | Error::InvalidEfficiency(_)
            | Error::InvalidRank { .. }
            | Error::EqualIndices(_)
            | Error::ZeroCoefficient
            | Error::IndexOutOfRange { .. } => 2,
            Error::Io(_) | Error::Json(_) => 4,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
