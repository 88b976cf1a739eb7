use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("capacity exceeded: {n} qubits requested, at most {max} supported")]
    Capacity { n: usize, max: usize },

    #[error("not a stabilizer state: {0}")]
    NotStabilizerState(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("copy budget of {budget} exhausted")]
    AccessExhausted { budget: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Dimension { expected, found })
    }
}
