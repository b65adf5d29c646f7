use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected dim={expected}, got dim={got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid point set: {0}")]
    InvalidPoints(String),

    #[error("center set is empty")]
    EmptyCenters,

    #[error("point subset is empty")]
    EmptySubset,

    #[error("k={k} exceeds the number of distinct points ({distinct})")]
    InfeasibleK { k: usize, distinct: usize },

    /// Every point coincides with a current center, so D² weights are all zero.
    #[error("D² sampling mass is zero")]
    ZeroMass,

    #[error("exact oracle supports n <= {max_n} and k <= {max_k}, got n={n}, k={k}")]
    OracleTooLarge {
        n: usize,
        k: usize,
        max_n: usize,
        max_k: usize,
    },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("usage error: {0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } => 3,
            Error::OracleTooLarge { .. } => 4,
            Error::Io(_) | Error::Json(_) => 1,
            _ => 2,
        }
    }
}
