//! Error type shared across the crate.

use std::fmt;

/// Errors reported by the solver library.
#[derive(Debug)]
pub enum Error {
    /// Invalid configuration (unsupported dimension, non-positive viscosity,
    /// void fraction out of range, bad resolution list, ...).
    Config(String),
    /// Caller misuse (unknown case id, mismatched field shapes, ...).
    Usage(String),
    /// The simulation produced a non-finite or non-positive state.
    NumericalBreakdown {
        step: u64,
        cell: usize,
        detail: String,
    },
    /// File input/output failure.
    Io(std::io::Error),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Config(msg) => write!(f, "configuration error: {msg}"),
            Error::Usage(msg) => write!(f, "usage error: {msg}"),
            Error::NumericalBreakdown { step, cell, detail } => {
                write!(f, "numerical breakdown at step {step}, cell {cell}: {detail}")
            }
            Error::Io(err) => write!(f, "i/o error: {err}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(err) => Some(err),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
