use core::fmt;

/// Errors surfaced by validation and by the numeric intersection solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Error {
    /// A weight was zero, negative, or not finite.
    NonPositiveWeight { index: usize, value: f64 },
    /// A sample entry was zero, negative, or not finite.
    NonPositiveArgument { index: usize, value: f64 },
    /// Two paired slices disagreed in length.
    LengthMismatch { left: usize, right: usize },
    /// A slice was shorter than the operation supports.
    TooShort { len: usize, min: usize },
    /// Grid abscissae must be finite and strictly increasing; the entry at
    /// `index` breaks that.
    NonMonotoneGrid { index: usize },
    /// A sum of inputs left the finite range.
    NonFiniteSum,
    /// The damped Newton iteration stopped without meeting the residual
    /// tolerance.
    NoConvergence { iterations: usize, max_residual: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Error::NonPositiveWeight { index, value } => {
                write!(f, "weight at index {index} must be finite and positive, got {value}")
            }
            Error::NonPositiveArgument { index, value } => {
                write!(f, "sample at index {index} must be finite and positive, got {value}")
            }
            Error::LengthMismatch { left, right } => {
                write!(f, "paired inputs differ in length: {left} vs {right}")
            }
            Error::TooShort { len, min } => {
                write!(f, "input of length {len} is too short, need at least {min}")
            }
            Error::NonMonotoneGrid { index } => {
                write!(f, "grid abscissae must be finite and strictly increasing at index {index}")
            }
            Error::NonFiniteSum => write!(f, "sum of inputs is not finite"),
            Error::NoConvergence { iterations, max_residual } => {
                write!(
                    f,
                    "no convergence after {iterations} iterations, residual {max_residual:e}"
                )
            }
        }
    }
}

impl core::error::Error for Error {}
