use core::fmt;

use alloc::string::String;

/// Errors produced by the core routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// The family/link combination has no coded composite function.
    UnsupportedPair { family: &'static str, link: String },
    /// A linear predictor fell outside the link's admissible range.
    Domain { link: String, eta: f64 },
    /// Unknown link, family or preset name.
    UnknownName(String),
    /// The selected design columns are linearly dependent.
    RankDeficient { columns: usize },
    /// Invalid arguments to a combinatorial or grid routine.
    InvalidArgs(String),
    /// Malformed dataset (shape, non-finite entries, bad response values).
    InvalidData(String),
    /// Forward selection was given no candidates.
    EmptyCandidates,
    /// No candidate fit converged at the first forward step.
    PathEmpty,
    /// A simulation design parameter is out of range.
    InvalidDesign(String),
    /// Compound-symmetry correlation outside `[0, 1)`.
    InvalidRho(f64),
    /// A cross-validation fold leaves too few observations to fit.
    FoldTooSmall { folds: usize, n: usize },
    /// A ratio denominator is exactly zero.
    ZeroDenominator,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::UnsupportedPair { family, link } => {
                write!(f, "unsupported family/link pair: {family} + {link}")
            }
            Error::Domain { link, eta } => {
                write!(
                    f,
                    "linear predictor {eta} outside admissible range of {link} link"
                )
            }
            Error::UnknownName(name) => write!(f, "unknown name `{name}`"),
            Error::RankDeficient { columns } => {
                write!(f, "design matrix with {columns} columns is rank deficient")
            }
            Error::InvalidArgs(msg) => write!(f, "invalid arguments: {msg}"),
            Error::InvalidData(msg) => write!(f, "invalid data: {msg}"),
            Error::EmptyCandidates => f.write_str("no candidate features"),
            Error::PathEmpty => f.write_str("no candidate fit converged at the first step"),
            Error::InvalidDesign(msg) => write!(f, "invalid simulation design: {msg}"),
            Error::InvalidRho(rho) => write!(f, "correlation {rho} outside [0, 1)"),
            Error::FoldTooSmall { folds, n } => {
                write!(f, "{folds} folds are too many for {n} observations")
            }
            Error::ZeroDenominator => f.write_str("zero denominator"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
