use thiserror::Error;

/// Errors raised by the model, grid, solver and harness layers.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the interval on which a function is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// Invalid construction parameters or configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// Two grids that must coincide do not.
    #[error("shape error: {0}")]
    Shape(String),

    /// A nonlinearity analysis could not produce the requested object.
    #[error("analysis error: {0}")]
    Analysis(String),

    /// The explicit update produced a value outside the certified range.
    #[error("stability fault at t={time}: value {value} escapes [{lo}, {hi}]")]
    Stability { time: f64, value: f64, lo: f64, hi: f64 },

    /// A far-field boundary cell drifted away from the far-field constant.
    #[error("domain too small at t={time}: boundary deviation {deviation:e} exceeds {limit:e}")]
    DomainTooSmall { time: f64, deviation: f64, limit: f64 },

    /// Random lattice generation exhausted its retry budget.
    #[error("generation error: {0}")]
    Generation(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
