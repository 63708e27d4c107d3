use thiserror::Error;

use crate::atlas::Violation;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected rank {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("fan is not smooth: cone spanned by {0} and {1} has |det| = {2}")]
    NonSmooth(String, String, String),

    #[error("fan is not complete: {0}")]
    NonComplete(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("atlas violates {} invariant(s)", .0.len())]
    InvalidAtlas(Vec<Violation>),

    #[error("precondition failed: {0}")]
    Precondition(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_rank(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        Err(Error::Dimension { expected, found })
    } else {
        Ok(())
    }
}
