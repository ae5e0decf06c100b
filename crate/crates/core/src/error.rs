use thiserror::Error;

/// Errors raised by the evaluators, integrators and the study driver.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),

    /// A truncated singular or infinite integral left a remainder larger than
    /// the requested tolerance.
    #[error("insufficient radial depth: tail bound {bound:e} exceeds tolerance {tol:e}")]
    InsufficientRadialDepth { bound: f64, tol: f64 },

    #[error("bracket expansion failed while searching for the level {target}")]
    BracketExpansion { target: f64 },

    #[error("modular is not monotone in the scaling parameter near lambda = {lambda}")]
    NonMonotone { lambda: f64 },

    #[error("bisection did not converge; last bracket [{lo}, {hi}]")]
    MaxIterations { lo: f64, hi: f64 },

    #[error("spec mismatch: {0}")]
    SpecMismatch(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("study at s = {s}: {source}")]
    Study {
        s: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("toml: {0}")]
    Toml(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True when the root cause is a truncation bound exceeding its tolerance.
    pub fn is_tail_failure(&self) -> bool {
        match self {
            Error::InsufficientRadialDepth { .. } => true,
            Error::Study { source, .. } => source.is_tail_failure(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_nonneg(t: f64) -> Result<()> {
    if t >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("argument must be nonnegative, got {t}")))
    }
}
