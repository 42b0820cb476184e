use thiserror::Error;

/// Errors raised by the library. Structural network violations are not
/// errors; they are reported by [`crate::graph::validate_network`].
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("duplicate {kind} id: {id}")]
    DuplicateId { kind: &'static str, id: String },

    #[error("unknown node: {0}")]
    UnknownNode(String),

    #[error("unknown edge: {0}")]
    UnknownEdge(String),

    #[error("cycle detected")]
    Cycle,

    #[error("limit exceeded: {limit} (required {required}, allowed {allowed})")]
    LimitExceeded {
        limit: &'static str,
        required: u128,
        allowed: u128,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid target function: {0}")]
    InvalidFunction(String),

    #[error("{0} is not prime")]
    NonPrime(usize),

    #[error("linear map has an all-zero column at position {0}")]
    ZeroColumn(usize),

    #[error("linear map has rank {rank} but {rows} rows")]
    RankDeficient { rank: usize, rows: usize },

    #[error("source sets overlap: {0}")]
    Overlap(String),

    #[error("malformed partition context: {0}")]
    MalformedContext(String),

    /// An invariant that the theory guarantees did not hold. Always a bug.
    #[error("internal consistency failure: {0}")]
    Consistency(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("cut is not global: {0}")]
    NotGlobalCut(String),

    #[error("decoder is ill-defined on the cut: two inputs share cut messages but differ in the target value")]
    IllDefinedDecoder,

    #[error("edge {0} is not surjective onto the message alphabet")]
    NotSurjective(String),

    #[error("no cut constrains the rate")]
    NoConstrainingCut,
}

impl Error {
    pub(crate) fn from_json(err: serde_json::Error) -> Self {
        Error::Syntax {
            line: err.line(),
            column: err.column(),
            message: err.to_string(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
