use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max asymmetry {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semi-definite (min eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("effect {index} is not positive semi-definite (min eigenvalue {min_eigenvalue:e})")]
    EffectNotPsd { index: usize, min_eigenvalue: f64 },

    #[error("effects do not sum to the identity (max deviation {0:e})")]
    NotComplete(f64),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("operation requires dimension {expected}, got {actual}")]
    WrongDimension { expected: usize, actual: usize },

    #[error("Bloch vector of length {0} lies outside the unit ball")]
    OutsideBlochBall(f64),

    #[error("not a density matrix: {0}")]
    InvalidState(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("measurement direction is degenerate (|a| = {0:e}); use the matrix channel")]
    DegenerateDirection(f64),

    #[error("outcome {index} has probability {probability:e}")]
    ZeroProbabilityOutcome { index: usize, probability: f64 },

    #[error("outcome index {index} out of range for {outcomes} outcomes")]
    OutcomeOutOfRange { index: usize, outcomes: usize },

    #[error("state is not supported on the given two-vector span: {0}")]
    SupportMismatch(String),

    #[error("random normalizer is singular (min eigenvalue {0:e})")]
    SingularNormalizer(f64),

    #[error("exponential fit requires positive values, got {value} at n = {n}")]
    NonPositiveValue { n: f64, value: f64 },

    #[error("empty input: {0}")]
    Empty(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
