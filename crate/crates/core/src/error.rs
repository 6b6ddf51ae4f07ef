use thiserror::Error;

/// Errors raised by the optimization library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("delta too large for set: alpha = {alpha} must be < 1")]
    DeltaTooLarge { alpha: f64 },

    #[error("point outside domain: {0}")]
    OutsideDomain(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("horizon too small: {0}")]
    HorizonTooSmall(String),

    #[error("adversary exhausted after {rounds} rounds")]
    EnvExhausted { rounds: usize },

    #[error("feedback budget exceeded in round {round}")]
    BudgetExceeded { round: usize },

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o failure: {0}")]
    Io(String),
}

impl Error {
    /// True for errors caused by a malformed configuration rather than a
    /// violated algorithm precondition.
    pub fn is_config_error(&self) -> bool {
        matches!(self, Error::Config(_) | Error::Io(_))
    }

    /// Process exit code: 2 for configuration errors, 3 for precondition
    /// failures.
    pub fn exit_code(&self) -> i32 {
        if self.is_config_error() {
            2
        } else {
            3
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::DeltaTooLarge { .. } => "delta_too_large",
            Error::OutsideDomain(_) => "outside_domain",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::HorizonTooSmall(_) => "horizon_too_small",
            Error::EnvExhausted { .. } => "env_exhausted",
            Error::BudgetExceeded { .. } => "budget_exceeded",
            Error::Unsupported(_) => "unsupported",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
