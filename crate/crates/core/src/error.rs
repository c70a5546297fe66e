use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("series is not invertible: constant term is {0}, expected 1 or -1")]
    NonUnit(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("part {part} is not congruent to +-{r} mod {m}")]
    ResidueMismatch { part: u32, m: u32, r: u32 },

    #[error("part {part} exceeds the largest-part bound {bound}")]
    PartTooLarge { part: u32, bound: u32 },

    #[error("cannot parse {what}: {detail}")]
    Parse { what: &'static str, detail: String },

    #[error("exhaustive enumeration of n = {n} exceeds the limit {limit}; pass an explicit override")]
    EnumerationLimit { n: u32, limit: u32 },

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
