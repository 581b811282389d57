use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A coordinate vector does not describe a point of the open unit ball,
    /// or an operation left the ball.
    #[error("domain error: {0}")]
    Domain(String),

    /// A scalar argument is outside its admissible range.
    #[error("range error: {what} = {value} not in {range}")]
    Range {
        what: &'static str,
        value: f64,
        range: String,
    },

    #[error("empty input")]
    Empty,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// Requested work exceeds a configured cap.
    #[error("input too large: {size} exceeds cap {cap} ({what})")]
    TooLarge {
        what: &'static str,
        size: usize,
        cap: usize,
    },

    #[error("numeric failure: {0}")]
    Numeric(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon < 1.0 {
        Ok(())
    } else {
        Err(Error::Range {
            what: "epsilon",
            value: epsilon,
            range: "(0, 1)".into(),
        })
    }
}
