use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("floating-point overflow: {0}")]
    Overflow(String),

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("the {0:?} unit ball has no finite set of extreme points")]
    NotEnumerable(crate::spaces::NormId),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("simplex did not terminate within {0} pivots")]
    NonTermination(usize),

    #[error("degenerate witness set: {0}")]
    DegenerateWitnesses(String),

    #[error("construction failed: {0}")]
    Construction(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}
