//! Hyperspaces of the interval and the circle: subcontinua and finite subsets
//! with the Hausdorff metric, and the maps induced on them.

mod metric;
mod point;
mod sample;

pub use metric::{
    arc_contains, arc_distance, finite_distance, fixed_hyperpoints, hausdorff, induce, induce_continuum,
    induce_symmetric, interval_distance, ArcRef,
};
pub use point::{Coords, HyperPoint, StateSpace, TrianglePt};
pub use sample::{sample_region, Region, SampleCloud};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HyperError {
    #[error("points belong to different hyperspaces")]
    Mismatch,
    #[error("invalid hyperpoint: {0}")]
    Invalid(String),
    #[error("resolution {0} is too coarse to place a single grid point")]
    TooCoarse(f64),
    #[error("induced fixed sets need an orientation-preserving map; use its square")]
    Reversing,
    #[error("{0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
