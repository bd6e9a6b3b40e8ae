use thiserror::Error;

/// Errors raised by the operator algebra, builders and solvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {left} sites vs {right} sites")]
    DimensionMismatch { left: usize, right: usize },

    #[error("{n_sites} sites exceeds the supported maximum of {max}")]
    TooManySites { n_sites: usize, max: usize },

    #[error("invalid site: {0}")]
    InvalidSite(String),

    #[error("layout mismatch: {0}")]
    LayoutMismatch(String),

    #[error("size guard exceeded: {what} needs {requested}, limit is {limit}")]
    GuardExceeded {
        what: &'static str,
        requested: usize,
        limit: usize,
    },

    #[error("matrix is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("spectrum length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error(
        "root finder failed for the {family} family: found {found} roots, expected {expected}"
    )]
    RootCount {
        family: &'static str,
        found: usize,
        expected: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
