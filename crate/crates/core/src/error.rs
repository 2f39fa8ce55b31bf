use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("valuation of zero is +∞")]
    ValuationOfZero,
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("p-adic precision {0} is below the minimum of 4")]
    PrecisionTooSmall(u32),
    #[error("p-adic context mismatch: {0} vs {1}")]
    ContextMismatch(String, String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("log domain: |1−q|_p too large")]
    LogDomain,
    #[error("inadmissible q = {q}: {reason}")]
    InadmissibleQ { q: String, reason: String },
    #[error("cannot evaluate negative powers of L at L = 0")]
    ZeroEvaluation,
    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),
    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("tail bound {bound} exceeds tolerance/10; increase M")]
    TailBound { bound: String },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
