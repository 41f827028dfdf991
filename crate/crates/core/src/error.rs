//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("accuracy loss: achieved bound {achieved:e}")]
    AccuracyLoss { achieved: f64 },
    #[error("bracket failure: {0}")]
    Bracket(String),
    #[error("pole: {0}")]
    Pole(String),
    #[error("structural error: {0}")]
    Structural(String),
    #[error("tolerance failure: {0}")]
    Tolerance(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("s = {s} lies outside the strip Re(s) > {bound}")]
    OutOfStrip { s: String, bound: f64 },
    #[error("s = {s} is within {distance:e} of the pole at {pole}")]
    PoleProximity { s: String, pole: f64, distance: f64 },
    #[error("no convergence: {0}")]
    Nonconvergence(String),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Domain(_) | Error::OutOfStrip { .. } => 1,
            Error::AccuracyLoss { .. }
            | Error::Tolerance(_)
            | Error::Nonconvergence(_)
            | Error::PoleProximity { .. } => 2,
            Error::Bracket(_) | Error::Pole(_) | Error::Structural(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
