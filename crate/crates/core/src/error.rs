use alloc::string::String;

use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("operator must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("operator is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    /// A computation would exceed a configured size ceiling.
    #[error("{what}: requested {requested}, limit {limit}")]
    ResourceGate {
        what: &'static str,
        requested: usize,
        limit: usize,
    },

    #[error("{what} = {value} is out of range ({allowed})")]
    OutOfRange {
        what: &'static str,
        value: f64,
        allowed: &'static str,
    },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("linear system is singular")]
    Singular,

    #[error("cannot parse {what}: {input:?}")]
    Parse { what: &'static str, input: String },
}

impl Error {
    pub(crate) fn out_of_range(what: &'static str, value: f64, allowed: &'static str) -> Self {
        Error::OutOfRange {
            what,
            value,
            allowed,
        }
    }

    /// True for errors that signal an exceeded size ceiling rather than bad
    /// input.
    pub fn is_resource_gate(&self) -> bool {
        matches!(self, Error::ResourceGate { .. })
    }
}
