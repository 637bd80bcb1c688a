use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("fractional order must satisfy 1 < alpha <= 2, got {0}")]
    InvalidOrder(f64),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("size guard: {what} requires at most {max} subintervals, got {got}")]
    SizeGuard { what: &'static str, max: usize, got: usize },

    #[error("incompatible grids: {0}")]
    IncompatibleGrids(String),

    #[error("conjugate gradients did not converge in {iterations} iterations (relative residual {residual:e})")]
    CgNotConverged { iterations: usize, residual: f64 },

    #[error("dense factorization failed: {0}")]
    Factorization(String),

    #[error("startup fixed-point iteration did not converge in {iterations} iterations (last update {update:e})")]
    StartupNotConverged { iterations: usize, update: f64 },

    #[error("step {step} failed: {source}")]
    Step {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("ladder level {level} failed: {source}")]
    Level {
        level: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serialize(String),
}

impl Error {
    /// True for failures of the numerics (solver breakdown) as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::CgNotConverged { .. } | Error::Factorization(_) | Error::StartupNotConverged { .. } => true,
            Error::Step { source, .. } | Error::Level { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}

pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected, got })
    }
}
