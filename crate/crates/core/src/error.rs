use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("enumeration of {size} solutions exceeds the budget of {budget}")]
    BudgetExceeded { size: u128, budget: u128 },

    #[error("fitness value {value} is not integral and no binning was given")]
    Unbinnable { value: String },

    #[error("grid level {level} is outside [{v_min}, {v_max}]")]
    OutOfRange { level: i64, v_min: i64, v_max: i64 },

    #[error("grid level {level} has no solutions")]
    EmptyLevel { level: i64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid histogram: {0}")]
    InvalidHistogram(String),

    #[error("invalid aggregate landscape: {0}")]
    InvalidLandscape(String),

    #[error("histograms are defined over different grids")]
    GridMismatch,

    #[error("{pairs} city pairs cannot take {values} distance values with the declared multiplicities ({detail})")]
    InconsistentMultiplicity {
        pairs: usize,
        values: u32,
        detail: String,
    },

    #[error("invalid problem instance: {0}")]
    InvalidInstance(String),

    #[error("gap profile infeasible at level {level}: {reason}")]
    InfeasibleProfile { level: i64, reason: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
