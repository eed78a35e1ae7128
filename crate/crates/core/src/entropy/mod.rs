//! Polynomial entropy from its definition: `(n, eps)`-separated sets under the
//! dynamic metric, counted on finite clouds and fitted on log–log axes.

mod cloud;
mod estimate;
mod packing;
mod system;

pub use cloud::{wandering_intervals, CloudPoint, LatticeSpec, OrbitBank, OrbitCloud, Track};
pub use estimate::{
    estimate_hpol, fit_counts, fit_line, separated_count, separated_counts, shuffled_order, EntropyEstimate, EpsFit,
    EstimateOptions, SeparatedCount, DEFAULT_EPS_LIST, DEFAULT_N_LIST,
};
pub use packing::Packer;
pub use system::{dyn_metric, DynSystem, Shape, State};

use crate::hyperspace::HyperError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EntropyError {
    #[error("the estimators need an orientation-preserving map; use its square")]
    Reversing,
    #[error("{0}")]
    Mismatch(String),
    #[error("{0}")]
    Config(String),
    #[error("empty cloud")]
    EmptyCloud,
    #[error("fewer than 3 usable (n, count) pairs after saturation filtering")]
    TooFewPoints,
    #[error(transparent)]
    Hyper(#[from] HyperError),
}
