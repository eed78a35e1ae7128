//! Declarative experiments, persisted reports and the two reproduction harnesses.

mod config;
mod report;
mod run;
mod setup;

pub use config::{ExperimentConfig, Method, OutputPaths, SingularQuery, Target, Tolerances};
pub use report::{Check, Eq2Result, Provenance, Report, Row, VerdictResult};
pub use run::{reproduce_theorem_a, reproduce_theorem_b, run, run_singular};
pub use setup::{
    base_letters, build_cloud, continuum_letters, restrict_map, symmetric_letters, usable_power, Budget, Restrict,
    Wandering,
};

use crate::coding::CodingError;
use crate::dynamics1d::MapError;
use crate::entropy::EntropyError;
use crate::hyperspace::HyperError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("{path}: {message}")]
    Field { path: String, message: String },
    #[error("map: {0}")]
    Map(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Entropy(#[from] EntropyError),
    #[error(transparent)]
    Coding(#[from] CodingError),
}

impl From<MapError> for ExperimentError {
    fn from(e: MapError) -> Self {
        ExperimentError::Map(e.to_string())
    }
}

impl From<HyperError> for ExperimentError {
    fn from(e: HyperError) -> Self {
        ExperimentError::Entropy(e.into())
    }
}
