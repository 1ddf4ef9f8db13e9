use thiserror::Error;

/// Every failure the engine can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QotError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("{what} = {value:e} lies outside [{lo:e}, {hi:e}]")]
    OutOfRange {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("channels {first} and {second} overlap")]
    ChannelOverlap { first: usize, second: usize },

    #[error("channel {0} is not part of the plan")]
    UnknownChannel(usize),

    #[error("channel {0} cannot act as its own interferer")]
    SelfInterference(usize),

    #[error("phase-mismatch factor is zero; the closed form needs a dispersive fiber")]
    ZeroDispersion,

    #[error("quadrature did not converge: {0}")]
    QuadratureNonConvergence(String),

    #[error("model `{0}` is already registered")]
    DuplicateModel(String),

    #[error("no model registered under `{0}`")]
    UnknownModel(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl QotError {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        QotError::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            QotError::ZeroDispersion | QotError::QuadratureNonConvergence(_) => 2,
            QotError::Io(_) => 3,
            _ => 1,
        }
    }
}

impl From<std::io::Error> for QotError {
    fn from(e: std::io::Error) -> Self {
        QotError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, QotError>;
