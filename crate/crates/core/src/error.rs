use thiserror::Error;

/// Broad failure class, used by front ends to pick exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    InvalidInput,
    Infeasible,
    NotConverged,
    Io,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("index {index} out of range (code book holds {size} sequences)")]
    IndexOutOfRange { index: String, size: String },
    #[error("sequence has length {found}, trellis expects {expected}")]
    SequenceLength { expected: usize, found: usize },
    #[error("amplitude {0} is not part of the alphabet")]
    UnknownAmplitude(u32),
    #[error("sequence weight {weight} exceeds l_max = {l_max}")]
    WeightExceeded { weight: u64, l_max: u64 },
    #[error("sequence composition does not match the constant composition")]
    CompositionMismatch,
    #[error("cannot carry {k_bits} bits: at most {max_bits} bits are representable")]
    InfeasibleRate { k_bits: u64, max_bits: u64 },
    #[error("no convergence after {iterations} iterations (gap {gap:e})")]
    NotConverged { iterations: usize, gap: f64 },
    #[error("malformed trellis cache: {0}")]
    Cache(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InfeasibleRate { .. } => ErrorKind::Infeasible,
            Error::NotConverged { .. } => ErrorKind::NotConverged,
            Error::Io(_) => ErrorKind::Io,
            _ => ErrorKind::InvalidInput,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
