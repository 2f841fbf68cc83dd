use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("matrix is not positive semidefinite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    #[error(
        "objective has no minimizer: linear term lies outside the range of the quadratic form"
    )]
    NoMinimizer,

    #[error("label {value} at index {index} is not -1 or +1")]
    InvalidLabel { index: usize, value: f64 },

    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },

    #[error("{name} must be nonnegative, got {value}")]
    Negative { name: &'static str, value: f64 },

    #[error("reference minimizer is required but was not provided")]
    MissingMinimizer,

    #[error("step-size underflow at t = {t}: h = {step:e}")]
    StepUnderflow { t: f64, step: f64 },

    #[error("integration exceeded {max_steps} steps before t_end")]
    TooManySteps { max_steps: usize },

    #[error("variant `{variant}` cannot be used with a {problem} problem")]
    IncompatibleVariant {
        variant: &'static str,
        problem: &'static str,
    },

    #[error("variant `{variant}` requires {what}")]
    MissingParameter {
        variant: &'static str,
        what: &'static str,
    },

    #[error("non-finite iterate at iteration {iteration}")]
    Diverged { iteration: usize },

    #[error("no positive step size solves the parameter relation (gamma = {gamma}, mu = {mu}, L = {lipschitz})")]
    NoPositiveRoot { gamma: f64, mu: f64, lipschitz: f64 },

    #[error("iteration counter must be at least 1 for the three-term recurrence, got {0}")]
    InsufficientHistory(usize),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid fixture: {0}")]
    Fixture(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub(crate) fn ensure_positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositive { name, value })
    }
}

pub(crate) fn ensure_nonnegative(name: &'static str, value: f64) -> Result<()> {
    if value >= 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::Negative { name, value })
    }
}
