use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("numerical error at t = {time}: {reason}")]
    NumericalAt { time: f64, reason: String },

    #[error("no steady state: {0}")]
    NoSteadyState(String),

    #[error("not enough data: {0}")]
    NotEnoughData(String),

    #[error("precondition violated: {0}")]
    Precondition(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }

    /// True for failures originating in a solver rather than in the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Numerical(_) | Error::NumericalAt { .. } | Error::NoSteadyState(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
