use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Series inversion needs a lowest coefficient of +1 or -1.
    #[error("series is not invertible: lowest coefficient at q^{exponent} is not +1 or -1")]
    NotAUnit { exponent: i64 },

    /// The coefficient lies at or beyond the truncation order and is unknown.
    #[error("coefficient of q^{exponent} is unknown (series is only known below q^{order})")]
    OutOfRange { exponent: i64, order: i64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("degenerate parameters: {0}")]
    Degenerate(String),

    #[error("enumeration exceeds the cap of {cap} partitions")]
    TooLarge { cap: usize },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParams(msg.into())
}
