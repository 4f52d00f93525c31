use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] gfr_core::Error),

    #[error("{path}: {source}")]
    File {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("{0}")]
    Usage(String),

    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

impl CliError {
    /// Process exit status: 2 input or validation, 3 numerical degeneracy,
    /// 4 combinatorial budget exceeded.
    pub fn exit_code(&self) -> i32 {
        use gfr_core::Error as E;
        match self {
            CliError::Core(E::DegenerateResponse | E::AllDegenerate | E::ConditionUndefined(_)) => 3,
            CliError::Core(E::BudgetExceeded { .. }) => 4,
            _ => 2,
        }
    }
}
