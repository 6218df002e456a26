use thiserror::Error;

/// Errors produced by the solver engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected:?}, found {found:?}")]
    DimensionMismatch {
        expected: Vec<usize>,
        found: Vec<usize>,
    },

    #[error("index {index:?} out of range for dims {dims:?}")]
    IndexOutOfRange { index: Vec<usize>, dims: Vec<usize> },

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("filter function has a pole at eigenvalue #{index} (theta*lambda = {value})")]
    FilterPole { index: usize, value: num_complex::Complex64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("non-finite state detected at step {step}")]
    BlowUp { step: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_dims(expected: &[usize], found: &[usize]) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: expected.to_vec(),
            found: found.to_vec(),
        })
    }
}
