use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("arm count must be at least 1")]
    InvalidDimension,

    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("round {round} outside horizon 1..={horizon}")]
    RoundOutOfRange { round: u64, horizon: u64 },

    #[error("linear program is infeasible")]
    InfeasibleLp,

    #[error("linear program is unbounded")]
    UnboundedLp,

    #[error("instance admits no feasible strategy on average")]
    InfeasibleInstance,

    #[error("grid oracle supports at most {max} arms, got {got}")]
    OracleScope { max: usize, got: usize },

    #[error("no strictly feasible arm: best margin {rho} is below the required {required}")]
    SlaterViolation { rho: f64, required: f64 },

    #[error("feedback does not match estimator mode")]
    FeedbackModeMismatch,

    #[error("corruption bound must be non-negative, got {0}")]
    NegativeCorruption(f64),

    #[error("projection input must be strictly positive at every entry")]
    NonPositiveWeight,

    #[error("benchmark comparator at phase {phase} violates a decision set (slack {slack})")]
    InvalidBenchmark { phase: usize, slack: f64 },

    #[error("scaling fit needs at least 3 points with positive values")]
    InvalidFitInput,

    #[error("feasibility margin must be positive to build the benchmark, got {0}")]
    NonPositiveMargin(f64),

    #[error("diagnostic requires data the run did not record: {0}")]
    MissingGroundTruth(&'static str),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
