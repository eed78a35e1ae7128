//! Piecewise-linear homeomorphisms of the interval and the circle.

mod description;
mod map;
mod scalar;

pub use description::{parse_coordinate, MapDescription};
pub use map::{Homeo1D, OrbitLimit, Orientation, Space};
pub use scalar::{format_exact, Exact};

use std::fmt;
use thiserror::Error;

/// One failed invariant of a map description.
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    TooFewBreakpoints { found: usize },
    NonFinite { index: usize },
    DomainStart { found: f64 },
    DomainEnd { found: f64 },
    AbscissaeNotIncreasing { index: usize },
    NotMonotoneIncreasing { index: usize },
    NotMonotoneDecreasing { index: usize },
    Endpoints { expected: (f64, f64), found: (f64, f64) },
    Degree { found: f64 },
    NonFiniteFixedSet { segment: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::TooFewBreakpoints { found } => {
                write!(f, "need at least 2 breakpoints, found {found}")
            }
            Violation::NonFinite { index } => write!(f, "breakpoint {index}: non-finite coordinate"),
            Violation::DomainStart { found } => write!(f, "breakpoint 0: x must be 0, found {found}"),
            Violation::DomainEnd { found } => write!(f, "last breakpoint: x must be 1, found {found}"),
            Violation::AbscissaeNotIncreasing { index } => {
                write!(f, "breakpoint {index}: x not strictly increasing")
            }
            Violation::NotMonotoneIncreasing { index } => {
                write!(f, "breakpoint {index}: not monotone increasing")
            }
            Violation::NotMonotoneDecreasing { index } => {
                write!(f, "breakpoint {index}: not monotone decreasing")
            }
            Violation::Endpoints { expected, found } => write!(
                f,
                "endpoint values ({}, {}) should be ({}, {})",
                found.0, found.1, expected.0, expected.1
            ),
            Violation::Degree { found } => {
                write!(f, "lift increment y_m - y_0 = {found}, expected ±1")
            }
            Violation::NonFiniteFixedSet { segment } => {
                write!(
                    f,
                    "segment {segment}: non-finite fixed set (segment lies on the diagonal)"
                )
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum MapError {
    #[error("invalid map: {}", join(.0))]
    Invalid(Vec<Violation>),
    #[error("{x} is outside the {space} domain")]
    Domain { x: f64, space: Space },
    #[error("orbit of {x} is still {residual:e} away from the fixed set after {horizon} steps")]
    Convergence { x: f64, horizon: u32, residual: f64 },
    #[error("orbit limits need an orientation-preserving map; use its square")]
    Reversing,
    #[error("map has no fixed points")]
    NoFixedPoints,
    #[error("maps act on different spaces")]
    SpaceMismatch,
    #[error("bad map description: {0}")]
    Parse(String),
}

fn join(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}
