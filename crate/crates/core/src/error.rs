use thiserror::Error;

/// Errors produced by the capacity toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// The architecture description is internally inconsistent.
    #[error("structural error: {0}")]
    Structure(String),

    /// A value lies outside the set it is required to live in.
    #[error("domain error: {0}")]
    Domain(String),

    /// A numeric parameter is out of its admissible range.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// An exhaustive routine was asked to handle more than it can enumerate.
    #[error("size limit exceeded: {0}")]
    Size(String),

    /// The requested construction is not supported for these inputs.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A randomized or greedy construction fell short of its guarantee.
    #[error("construction failed: {0}")]
    Construction(String),

    /// The smoothness constant is too small for any admissible bump.
    #[error("bump infeasible: requested c0 = {requested}, minimal admissible c0 = {minimal}")]
    BumpInfeasible { requested: f64, minimal: f64 },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
