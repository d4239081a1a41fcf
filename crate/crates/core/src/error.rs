use thiserror::Error;

/// Errors raised by the library. CLI exit codes are derived from the variant.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid nonlinearity: {0}")]
    Nonlinearity(String),

    #[error("invalid parameter `{name}`: {reason}")]
    Param { name: String, reason: String },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("no shooting bracket found for initial heights in [{lo:e}, {hi:e}]")]
    NoBracket { lo: f64, hi: f64 },

    #[error("shooting did not converge after {0} bisections")]
    NoConvergence(usize),

    #[error("class C_B is undefined for alpha1 = {0} (requires alpha1 < 2)")]
    UndefinedClass(f64),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("insufficient samples above the floor: {found} found, {needed} needed")]
    InsufficientSamples { found: usize, needed: usize },

    #[error("non-finite value at step {step} (t = {t})")]
    NonFinite { step: usize, t: f64 },

    #[error("plan inadmissible for {theorem}: {}", violated.join(", "))]
    Inadmissible { theorem: String, violated: Vec<String> },

    #[error("Picard iteration diverged; contraction factors {factors:?}")]
    Divergence { factors: Vec<f64> },

    #[error("config error in `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn param(name: &str, reason: impl Into<String>) -> Self {
        Error::Param { name: name.to_string(), reason: reason.into() }
    }

    pub fn config(field: &str, reason: impl Into<String>) -> Self {
        Error::Config { field: field.to_string(), reason: reason.into() }
    }

    /// Process exit status used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Inadmissible { .. } => 2,
            Error::Divergence { .. } | Error::NonFinite { .. } => 3,
            Error::Io(_) | Error::Format(_) => 4,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
