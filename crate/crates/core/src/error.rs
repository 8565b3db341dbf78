use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("line {line}: negative weight {weight}")]
    NegativeWeight { line: usize, weight: f64 },

    #[error("line {line}: self-loop on node {node}")]
    SelfLoop { line: usize, node: usize },

    #[error("matrix is not symmetric at ({row}, {col})")]
    Asymmetric { row: usize, col: usize },

    #[error("invalid edge ({u}, {v}, {weight}): {reason}")]
    InvalidEdge {
        u: usize,
        v: usize,
        weight: f64,
        reason: &'static str,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("size {n} exceeds the dense limit {cap}")]
    TooLarge { n: usize, cap: usize },

    #[error("moment sequence is not admissible at order {order}")]
    NotAdmissible { order: usize },

    #[error("moment sequence is singular at order {order}")]
    Singular { order: usize },

    #[error("numerical degeneracy: {0}")]
    Degenerate(String),

    #[error("node count mismatch: {expected} vs {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by malformed or inconsistent user input.
    pub fn is_input(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. }
                | Error::NegativeWeight { .. }
                | Error::SelfLoop { .. }
                | Error::Asymmetric { .. }
                | Error::InvalidEdge { .. }
                | Error::InvalidParameter(_)
                | Error::TooLarge { .. }
                | Error::SizeMismatch { .. }
                | Error::Io(_)
        )
    }

    /// True for failures of the numerical machinery on valid input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NotAdmissible { .. } | Error::Singular { .. } | Error::Degenerate(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
