use thiserror::Error;

/// Errors raised by the numerical layers of the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("extrapolation error: {what} = {value:e} outside table range [{lo:e}, {hi:e}]")]
    Extrapolation {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("structural error: {0}")]
    Structural(String),

    #[error("N-function is not doubling: i_G = {i_g}, s_G = {s_g}")]
    NotDoubling { i_g: f64, s_g: f64 },

    #[error("equivalence failure: {0}")]
    Equivalence(String),

    #[error("undecided: {0}")]
    Undecided(String),

    #[error("verification failure: {0}")]
    Verification(String),

    #[error("inconsistent criteria: {0}")]
    Inconsistent(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
