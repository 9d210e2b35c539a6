use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("list entries must be nonzero")]
    ZeroEntry,
    #[error("list is degenerate: contains both {0} and its negation")]
    Degenerate(i64),
    #[error("dilation factor must be nonzero")]
    ZeroDilation,
    #[error("operation needs a nonempty list")]
    EmptyList,
    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("constraint violated: {0}")]
    ConstraintViolation(String),
    #[error("every entry of the instance cancels")]
    ZeroList,
    #[error("exact verification needs exactly two parameters, family has {0}")]
    DimensionUnsupported(usize),
    #[error("invalid family: {0}")]
    InvalidFamily(String),

    #[error("list {0} is not primitive")]
    NotPrimitive(&'static str),
    #[error("list b is not monotone")]
    NotMonotone,
    #[error("list {0} has zero sum")]
    ZeroSum(&'static str),
    #[error("sums {u} and {v} are not coprime")]
    SumsNotCoprime { u: i64, v: i64 },
    #[error("base list {0} is not an integral factorial ratio")]
    BaseNotIntegral(String),

    #[error("hypothesis not met: {0}")]
    HypothesisNotMet(String),
    #[error("{0} is not a prime >= 11")]
    BadPrime(i64),

    #[error("catalog error: {0}")]
    Catalog(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
