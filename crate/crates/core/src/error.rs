use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("design must have at least one row and one column")]
    EmptyDesign,

    #[error("non-finite value in {what} at position {index}")]
    NonFinite { what: &'static str, index: usize },

    #[error("column index {index} out of range for p = {p}")]
    IndexOutOfRange { index: usize, p: usize },

    #[error("column {0} is already in the model")]
    AlreadySelected(usize),

    #[error("model size {size} would exceed n = {n}")]
    ModelTooLarge { size: usize, n: usize },

    #[error("step size J = {j} must satisfy 1 <= J <= n = {n}")]
    InvalidStepSize { j: usize, n: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate response: ||y||^2 = 0")]
    DegenerateResponse,

    #[error("no non-degenerate candidate column is available")]
    AllDegenerate,

    #[error("combinatorial budget exceeded: {supports} supports > {budget}")]
    BudgetExceeded { supports: u128, budget: u128 },

    #[error("condition undefined: {0}")]
    ConditionUndefined(String),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed data: {0}")]
    Data(String),
}
