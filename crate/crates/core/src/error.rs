use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: max deviation {defect:e} exceeds tolerance")]
    NotHermitian { defect: f64 },

    #[error("matrix fails the {invariant} invariant: {detail}")]
    InvalidDensityMatrix { invariant: &'static str, detail: String },

    #[error("Bloch vector norm {norm} exceeds 1")]
    BlochNormExceeded { norm: f64 },

    #[error("parameter {name} = {value} outside valid range {range}")]
    ParameterOutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("measurement direction has zero norm")]
    ZeroDirection,

    #[error("{n} settings exceed the brute-force limit of 24")]
    TooManySettings { n: usize },

    #[error("expected {expected} directions, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("mu = {mu} exceeds 1/sqrt(3); the construction does not certify a Bell verdict")]
    ProofInvalidMu { mu: f64 },

    #[error("invalid mixture weights: {detail}")]
    InvalidWeights { detail: String },

    #[error("invalid steering settings: {detail}")]
    InvalidSettings { detail: String },

    #[error("malformed input: {0}")]
    Format(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}
