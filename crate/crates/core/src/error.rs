use thiserror::Error;

/// Errors raised by the kernels, beam model, grid sampler and file I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cone violation: |y| = {a} is not below s = {s}")]
    ConeViolation { a: f64, s: f64 },

    #[error("outside domain: {0}")]
    Domain(String),

    #[error("singular point: {what} has magnitude {magnitude:e} below epsilon {epsilon:e}")]
    Singularity {
        what: &'static str,
        magnitude: f64,
        epsilon: f64,
    },

    #[error("degenerate source disk: |y| = 0")]
    DegenerateDisk,

    #[error("emitter and receiver centers coincide")]
    CoincidentCenters,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("grid has {samples} samples, budget is {budget}")]
    BudgetExceeded { samples: u128, budget: u64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("malformed file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
