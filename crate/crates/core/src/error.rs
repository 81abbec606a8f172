use thiserror::Error;

/// Errors raised by the library. Every variant names the violated precondition.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid bit word {0:?}: only '0' and '1' are allowed")]
    InvalidBitWord(String),

    #[error("node index must be at least 1")]
    ZeroIndex,

    #[error("{0} is not a dyadic fraction in (0,1)")]
    NotDyadic(String),

    #[error("{0} is outside the open unit interval (0,1)")]
    OutsideUnitInterval(String),

    #[error("{0} is not strictly positive")]
    NotPositive(String),

    #[error("partial denominators and code inputs must be at least 1")]
    ZeroCodeInput,

    #[error("cannot parse {what} from {input:?}")]
    Parse { what: &'static str, input: String },

    #[error("{0} codes are not prefix-free and cannot be decoded")]
    NotPrefixFree(&'static str),

    #[error("malformed code stream: {0}")]
    MalformedStream(String),

    #[error("unary codeword of {0} bits exceeds the supported size")]
    TooLarge(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
