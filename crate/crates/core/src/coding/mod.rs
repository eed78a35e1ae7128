//! Orbit coding relative to a family of wandering letters: word counts,
//! relative and local polynomial entropy, visit bounds and singular pairs.

mod letters;
mod singular;
mod words;

pub use letters::{Family, LetterRegion, LetterSet};
pub use singular::{check_singular, eq2_condition, SingularityVerdict};
pub use words::{
    code_orbit, local_entropy, max_visits, relative_entropy, word_count, word_counts, word_set, CodingWord,
    LocalEntropy, MaxVisits,
};

use crate::entropy::EntropyError;
use crate::hyperspace::HyperError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CodingError {
    #[error("letters {a} and {b} both contain {state}")]
    Overlap { a: u16, b: u16, state: String },
    #[error("letter {letter} contains the fixed state {point}")]
    FixedInLetter { letter: u16, point: String },
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Parse(String),
    #[error(transparent)]
    Entropy(#[from] EntropyError),
}

impl From<HyperError> for CodingError {
    fn from(e: HyperError) -> Self {
        CodingError::Entropy(e.into())
    }
}
