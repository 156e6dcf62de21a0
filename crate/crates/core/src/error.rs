use thiserror::Error;

/// Errors raised anywhere in the engine.
///
/// Variants are grouped so that a driver can map them onto process exit
/// codes: configuration problems, numerical failures during a march, and
/// I/O or format problems.
#[derive(Debug, Error)]
pub enum PeError {
    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("invalid antenna: {0}")]
    Source(String),

    #[error("invalid terrain: {0}")]
    Terrain(String),

    #[error("invalid refractivity: {0}")]
    Refractivity(String),

    #[error("invalid boundary: {0}")]
    Boundary(String),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("config: {0}")]
    ConfigValue(String),

    #[error("non-finite field at range step {step} (x = {range_m} m)")]
    NonFinite { step: usize, range_m: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("{0}")]
    Format(String),

    #[error("unknown validation suite `{name}`; available: {available}")]
    UnknownSuite { name: String, available: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl PeError {
    /// True for errors that stem from user input rather than the numerics.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            PeError::Grid(_)
                | PeError::Source(_)
                | PeError::Terrain(_)
                | PeError::Refractivity(_)
                | PeError::Boundary(_)
                | PeError::Config { .. }
                | PeError::ConfigValue(_)
                | PeError::UnknownSuite { .. }
                | PeError::Unsupported(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, PeError>;
