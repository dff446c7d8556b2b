use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("need at least {needed} interpolation points, got {got}")]
    NotEnoughPoints { needed: usize, got: usize },

    #[error("duplicate interpolation node x = {0}")]
    DuplicateNode(String),

    #[error("point ({x}, {y}) does not lie on the fitted polynomial of degree <= {degree}")]
    FitMismatch { x: String, y: String, degree: usize },

    #[error("polynomial of degree {degree} exceeds operator degree {n}")]
    DegreeOverflow { degree: usize, n: usize },

    #[error("eigenvalue gap between k = {k} and k = {other} is degenerate")]
    DegenerateGap { k: usize, other: usize },

    #[error("no limit regime at q=1")]
    NoLimitRegime,

    #[error("regime violation: {0}")]
    Regime(String),

    #[error("cannot parse {input:?}: {reason}")]
    Parse { input: String, reason: String },
}

impl Error {
    pub(crate) fn parse(input: &str, reason: impl Into<String>) -> Self {
        Error::Parse {
            input: input.to_string(),
            reason: reason.into(),
        }
    }
}
