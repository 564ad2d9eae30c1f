use thiserror::Error;

/// Errors raised by the scans and their building blocks.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("arithmetic left the finite range ({0})")]
    NonFinite(&'static str),

    #[error("logarithm not certifiable: interval [{lo}, {hi}] touches zero")]
    LogDomain { lo: f64, hi: f64 },

    #[error("value not certifiable: {0}")]
    Domain(&'static str),

    #[error("invalid error bound {0}: must be finite and non-negative")]
    InvalidBound(f64),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("prime zeta P({0}) diverges; s must be at least 2")]
    Divergent(u32),

    #[error("residue {a} is not coprime to modulus {q}")]
    InvalidResidue { a: u64, q: u64 },

    #[error("limit {requested} exceeds the table built up to {available}")]
    TableTooSmall { requested: u64, available: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;
