use serde::{Deserialize, Serialize};
use smallvec::SmallVec;
use std::fmt;
use std::str::FromStr;

use super::HyperError;
use crate::dynamics1d::Space;

pub type Coords = SmallVec<[f64; 4]>;

/// A point of one of the hyperspaces C(I), C(S¹) or X^{*k}.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum HyperPoint {
    /// `[lo, hi] ⊆ [0,1]`; `lo == hi` is a singleton.
    Interval {
        lo: f64,
        hi: f64,
    },
    /// Counterclockwise arc `from → to`; `from == to` is a singleton.
    Arc {
        from: f64,
        to: f64,
    },
    FullCircle,
    /// A nonempty finite set, sorted, without duplicates.
    Finite(Coords),
}

impl HyperPoint {
    pub fn interval(lo: f64, hi: f64) -> Result<Self, HyperError> {
        if !(0.0 <= lo && lo <= hi && hi <= 1.0) {
            return Err(HyperError::Invalid(format!(
                "[{lo}, {hi}] is not a subinterval of [0,1]"
            )));
        }
        Ok(HyperPoint::Interval { lo, hi })
    }

    pub fn arc(from: f64, to: f64) -> Result<Self, HyperError> {
        if !from.is_finite() || !to.is_finite() {
            return Err(HyperError::Invalid("non-finite arc endpoint".into()));
        }
        Ok(HyperPoint::Arc {
            from: Space::Circle.normalize(from),
            to: Space::Circle.normalize(to),
        })
    }

    /// Sorts and collapses duplicates; circle coordinates are reduced mod 1 first.
    pub fn finite(space: Space, points: &[f64]) -> Result<Self, HyperError> {
        if points.is_empty() {
            return Err(HyperError::Invalid("empty point set".into()));
        }
        let mut v: Coords = points.iter().map(|&x| space.normalize(x)).collect();
        if v.iter().any(|&x| !space.contains(x)) {
            return Err(HyperError::Invalid(format!("point outside the {space}")));
        }
        v.sort_by(f64::total_cmp);
        v.dedup();
        Ok(HyperPoint::Finite(v))
    }

    pub fn singleton(x: f64) -> Self {
        HyperPoint::Finite(smallvec::smallvec![x])
    }

    /// Number of points of a finite set, `None` for continua.
    pub fn cardinality(&self) -> Option<usize> {
        match self {
            HyperPoint::Finite(v) => Some(v.len()),
            _ => None,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        match *self {
            HyperPoint::Interval { lo, hi } => lo == hi,
            HyperPoint::Arc { from, to } => from == to,
            HyperPoint::FullCircle => false,
            HyperPoint::Finite(ref v) => v.len() == 1,
        }
    }
}

impl fmt::Display for HyperPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HyperPoint::Interval { lo, hi } => write!(f, "I:{lo}:{hi}"),
            HyperPoint::Arc { from, to } => write!(f, "A:{from}:{to}"),
            HyperPoint::FullCircle => f.write_str("S1"),
            HyperPoint::Finite(v) => {
                f.write_str("F:")?;
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{x}")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for HyperPoint {
    type Err = HyperError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || HyperError::Parse(format!("cannot read hyperpoint {s:?}"));
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
        let s = s.trim();
        if s == "S1" {
            return Ok(HyperPoint::FullCircle);
        }
        let (tag, rest) = s.split_once(':').ok_or_else(bad)?;
        match tag {
            "I" => {
                let (a, b) = rest.split_once(':').ok_or_else(bad)?;
                HyperPoint::interval(num(a)?, num(b)?)
            }
            "A" => {
                let (a, b) = rest.split_once(':').ok_or_else(bad)?;
                HyperPoint::arc(num(a)?, num(b)?)
            }
            "F" => {
                let pts = rest.split(',').map(num).collect::<Result<Vec<_>, _>>()?;
                // Coordinates are kept as written; the caller's space decides the reduction.
                let mut v: Coords = pts.into_iter().collect();
                if v.is_empty() {
                    return Err(bad());
                }
                v.sort_by(f64::total_cmp);
                v.dedup();
                Ok(HyperPoint::Finite(v))
            }
            _ => Err(bad()),
        }
    }
}

/// A point `(x, y)` of the upper triangle `x ≤ y`, identified with `[x, y] ∈ C(I)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrianglePt {
    pub x: f64,
    pub y: f64,
}

impl TrianglePt {
    pub fn new(x: f64, y: f64) -> Result<Self, HyperError> {
        if x > y {
            return Err(HyperError::Invalid(format!("({x}, {y}) is below the diagonal")));
        }
        Ok(TrianglePt { x, y })
    }

    /// φ: C(I) → triangle.
    pub fn phi(p: &HyperPoint) -> Option<Self> {
        match *p {
            HyperPoint::Interval { lo, hi } => Some(TrianglePt { x: lo, y: hi }),
            _ => None,
        }
    }

    pub fn to_interval(self) -> HyperPoint {
        HyperPoint::Interval { lo: self.x, hi: self.y }
    }
}

/// Which space the states of a system live in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StateSpace {
    /// The base space itself; states are one-point `Finite` sets.
    Base(Space),
    Continuum(Space),
    /// Nonempty subsets with at most `k` points.
    Symmetric(Space, usize),
}

impl StateSpace {
    pub fn space(self) -> Space {
        match self {
            StateSpace::Base(s) | StateSpace::Continuum(s) | StateSpace::Symmetric(s, _) => s,
        }
    }

    /// Whether `p` is a legal state of this hyperspace.
    pub fn admits(self, p: &HyperPoint) -> bool {
        match (self, p) {
            (StateSpace::Base(_), HyperPoint::Finite(v)) => v.len() == 1,
            (StateSpace::Symmetric(_, k), HyperPoint::Finite(v)) => !v.is_empty() && v.len() <= k,
            (StateSpace::Continuum(Space::Interval), HyperPoint::Interval { .. }) => true,
            (StateSpace::Continuum(Space::Circle), HyperPoint::Arc { .. } | HyperPoint::FullCircle) => true,
            _ => false,
        }
    }
}

impl fmt::Display for StateSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateSpace::Base(s) => write!(f, "{s}"),
            StateSpace::Continuum(s) => write!(f, "C({s})"),
            StateSpace::Symmetric(s, k) => write!(f, "{s}^*{k}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        for p in [
            HyperPoint::Interval { lo: 0.25, hi: 0.5 },
            HyperPoint::Arc { from: 0.9, to: 0.1 },
            HyperPoint::FullCircle,
            HyperPoint::finite(Space::Interval, &[0.75, 0.25, 0.75]).unwrap(),
        ] {
            let s = p.to_string();
            assert_eq!(s.parse::<HyperPoint>().unwrap(), p, "{s}");
        }
        assert_eq!(
            HyperPoint::Finite(smallvec::smallvec![0.25, 0.75]).to_string(),
            "F:0.25,0.75"
        );
        assert!("Q:1".parse::<HyperPoint>().is_err());
        assert!("I:0.6:0.2".parse::<HyperPoint>().is_err());
    }

    #[test]
    fn finite_sets_collapse_duplicates() {
        let p = HyperPoint::finite(Space::Circle, &[1.0, 0.0, 0.5]).unwrap();
        assert_eq!(p, HyperPoint::Finite(smallvec::smallvec![0.0, 0.5]));
        assert!(HyperPoint::finite(Space::Interval, &[]).is_err());
    }

    #[test]
    fn triangle_identification() {
        let t = TrianglePt::new(0.2, 0.7).unwrap();
        assert_eq!(TrianglePt::phi(&t.to_interval()), Some(t));
        assert!(TrianglePt::new(0.7, 0.2).is_err());
    }

    #[test]
    fn arcs_never_become_full_circle() {
        let p = HyperPoint::arc(0.25, 1.25).unwrap();
        assert!(p.is_degenerate());
        assert_ne!(p, HyperPoint::FullCircle);
    }
}
