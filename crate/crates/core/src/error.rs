//! Error types shared across the crate.
//!
//! Errors carry a stable machine-readable code so the CLI (and the C API)
//! can map them onto exit statuses without string matching.

use thiserror::Error;

/// Everything that can go wrong while parsing inputs or running an operation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("graph must be connected")]
    Disconnected,

    #[error("loop edge {vertex}--{vertex} is not allowed; subdivide it first")]
    LoopEdge { vertex: String },

    #[error("edge length must be a positive integer, got {got}")]
    BadEdgeLength { got: i64 },

    #[error("graph has no vertices")]
    EmptyGraph,

    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),

    #[error("refinement level must be at least 1")]
    BadRefinement,

    #[error("divisor must be effective away from {0:?}")]
    NotEffectiveAwayFromSource(String),

    #[error("divisors live on different models")]
    ModelMismatch,

    #[error("series requires unit constant term, got {0}")]
    NonUnitConstantTerm(String),

    #[error("half-integer exponents need a square root; {0}")]
    BadExponent(String),

    #[error("no divisor of positive rank up to degree {max_degree}")]
    BoundExceeded { max_degree: i64 },

    #[error("invalid tree decomposition: {0}")]
    BadDecomposition(String),

    #[error("{0}")]
    Invalid(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Exit-status class of an error, mirrored by the CLI and the C API.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCode {
    /// Malformed input text.
    Parse = 2,
    /// Structurally invalid input (disconnected graph, loop edge, ...).
    Validation = 3,
    /// A bounded search ran out of budget without an answer.
    Bound = 4,
}

impl Error {
    pub fn code(&self) -> ErrorCode {
        match self {
            Error::Parse { .. } | Error::Io(_) => ErrorCode::Parse,
            Error::BoundExceeded { .. } => ErrorCode::Bound,
            _ => ErrorCode::Validation,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
