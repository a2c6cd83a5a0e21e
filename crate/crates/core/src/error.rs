use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("rational input: Gauss map reached 0 at step {at}")]
    RationalInput { at: usize },
    #[error("precision exhausted at depth {depth}: {reason}")]
    PrecisionExhausted { depth: usize, reason: String },
    #[error("convergent table too short: need q > {needed}, deepest available is {available}")]
    Depth { needed: String, available: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("degenerate incidence: {0}")]
    Degeneracy(String),
    #[error("cell coding is not constant on cell {cell}")]
    CodingAmbiguity { cell: usize },
    #[error("point lies on a discontinuity line: {0}")]
    BoundaryHit(String),
    #[error("sampling failed: {0}")]
    Sampling(String),
    #[error("map validation failed: {0}")]
    MapValidation(String),
}

/// Coarse error category, used by front ends to choose exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Degeneracy,
    Precision,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::RationalInput { .. }
            | Error::Parse(_)
            | Error::Config(_)
            | Error::MapValidation(_) => ErrorKind::Config,
            Error::Degeneracy(_) | Error::CodingAmbiguity { .. } | Error::BoundaryHit(_) | Error::Sampling(_) => {
                ErrorKind::Degeneracy
            }
            Error::PrecisionExhausted { .. } | Error::Depth { .. } => ErrorKind::Precision,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
