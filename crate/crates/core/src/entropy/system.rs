use crate::dynamics1d::{Homeo1D, Orientation, Space};
use crate::hyperspace::{
    arc_distance, finite_distance, fixed_hyperpoints, hausdorff, induce, ArcRef, HyperPoint, StateSpace,
};

use super::EntropyError;

/// A map together with the space its states live in: `f` on the base space,
/// `C(f)` on subcontinua, or `f^{*k}` on the k-fold symmetric product.
#[derive(Clone, Debug)]
pub struct DynSystem {
    map: Homeo1D,
    kind: StateSpace,
    fixed_base: Vec<f64>,
    fixed: Vec<HyperPoint>,
    lipschitz: f64,
}

impl DynSystem {
    /// Orientation-reversing maps are rejected; pass their square instead.
    pub fn new(map: Homeo1D, kind: StateSpace) -> Result<Self, EntropyError> {
        if map.orientation() != Orientation::Preserving {
            return Err(EntropyError::Reversing);
        }
        if map.space() != kind.space() {
            return Err(EntropyError::Mismatch(
                "map and state space disagree on the base space".into(),
            ));
        }
        if let StateSpace::Symmetric(_, 0) = kind {
            return Err(EntropyError::Mismatch("symmetric products need k >= 1".into()));
        }
        let fixed = fixed_hyperpoints(&map, kind)?;
        let fixed_base = map.fixed_points();
        let pts: Vec<(f64, f64)> = map.breakpoints().collect();
        let lipschitz = pts
            .windows(2)
            .map(|w| ((w[1].1 - w[0].1) / (w[1].0 - w[0].0)).abs())
            .fold(0.0, f64::max);
        Ok(DynSystem {
            map,
            kind,
            fixed_base,
            fixed,
            lipschitz,
        })
    }

    pub fn map(&self) -> &Homeo1D {
        &self.map
    }

    pub fn kind(&self) -> StateSpace {
        self.kind
    }

    pub fn space(&self) -> Space {
        self.kind.space()
    }

    pub fn fixed_points(&self) -> &[f64] {
        &self.fixed_base
    }

    pub fn fixed_hyperpoints(&self) -> &[HyperPoint] {
        &self.fixed
    }

    /// Largest slope of the map; also a Lipschitz constant of the induced maps.
    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn step(&self, p: &HyperPoint) -> Result<HyperPoint, EntropyError> {
        if !self.kind.admits(p) {
            return Err(EntropyError::Mismatch(format!("{p} is not a state of {}", self.kind)));
        }
        Ok(induce(&self.map, self.kind, p)?)
    }

    pub fn distance(&self, a: &HyperPoint, b: &HyperPoint) -> Result<f64, EntropyError> {
        Ok(hausdorff(self.space(), a, b)?)
    }

    /// Distance from a state to the fixed set of the system.
    pub fn activity(&self, p: &HyperPoint) -> f64 {
        self.fixed
            .iter()
            .filter_map(|q| hausdorff(self.space(), p, q).ok())
            .fold(f64::INFINITY, f64::min)
    }

    /// Smallest Hausdorff distance between two distinct fixed states.
    pub fn fixed_separation(&self) -> f64 {
        let mut sep = f64::INFINITY;
        for (i, p) in self.fixed.iter().enumerate() {
            for q in &self.fixed[i + 1..] {
                if let Ok(d) = hausdorff(self.space(), p, q) {
                    sep = sep.min(d);
                }
            }
        }
        for (i, &p) in self.fixed_base.iter().enumerate() {
            for &q in &self.fixed_base[i + 1..] {
                sep = sep.min(self.space().distance(p, q));
            }
        }
        sep
    }
}

/// `d_n(x, y) = max_{0 ≤ k < n} d(F^k x, F^k y)`.
pub fn dyn_metric(sys: &DynSystem, x: &HyperPoint, y: &HyperPoint, n: usize) -> Result<f64, EntropyError> {
    if n == 0 {
        return Err(EntropyError::Mismatch("window length must be at least 1".into()));
    }
    let (mut a, mut b) = (x.clone(), y.clone());
    let mut d = sys.distance(&a, &b)?;
    for _ in 1..n {
        a = sys.step(&a)?;
        b = sys.step(&b)?;
        d = d.max(sys.distance(&a, &b)?);
    }
    Ok(d)
}

/// Shape of a cloud state; decides which Hausdorff formula applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Shape {
    /// A finite set of base points (a single point for base systems).
    Set,
    Interval,
    Arc,
    FullCircle,
}

/// A state evaluated at one time: its shape and up to four coordinates.
#[derive(Clone, Copy, Debug)]
pub struct State {
    pub shape: Shape,
    pub len: u8,
    pub c: [f64; 4],
}

impl State {
    #[inline]
    pub fn coords(&self) -> &[f64] {
        &self.c[..self.len as usize]
    }

    #[inline]
    pub fn distance(&self, space: Space, other: &State) -> f64 {
        match (self.shape, other.shape) {
            (Shape::Interval, Shape::Interval) => (self.c[0] - other.c[0]).abs().max((self.c[1] - other.c[1]).abs()),
            (Shape::Set, Shape::Set) => {
                if self.len == 1 && other.len == 1 {
                    space.distance(self.c[0], other.c[0])
                } else {
                    finite_distance(space, self.coords(), other.coords())
                }
            }
            (Shape::Arc | Shape::FullCircle, Shape::Arc | Shape::FullCircle) => {
                arc_distance(self.arc_ref(), other.arc_ref())
            }
            _ => f64::NAN,
        }
    }

    #[inline]
    pub fn arc_ref(&self) -> ArcRef {
        match self.shape {
            Shape::Arc => ArcRef::Arc(self.c[0], self.c[1]),
            _ => ArcRef::Full,
        }
    }

    pub fn to_hyperpoint(&self) -> HyperPoint {
        match self.shape {
            Shape::Set => {
                let mut v: crate::hyperspace::Coords = self.coords().iter().copied().collect();
                v.sort_by(f64::total_cmp);
                v.dedup();
                HyperPoint::Finite(v)
            }
            Shape::Interval => HyperPoint::Interval {
                lo: self.c[0],
                hi: self.c[1],
            },
            Shape::Arc => HyperPoint::Arc {
                from: self.c[0],
                to: self.c[1],
            },
            Shape::FullCircle => HyperPoint::FullCircle,
        }
    }

    pub fn from_hyperpoint(p: &HyperPoint) -> Option<State> {
        let mut c = [0.0; 4];
        Some(match p {
            HyperPoint::Finite(v) => {
                if v.len() > 4 {
                    return None;
                }
                c[..v.len()].copy_from_slice(v);
                State {
                    shape: Shape::Set,
                    len: v.len() as u8,
                    c,
                }
            }
            &HyperPoint::Interval { lo, hi } => {
                c[0] = lo;
                c[1] = hi;
                State {
                    shape: Shape::Interval,
                    len: 2,
                    c,
                }
            }
            &HyperPoint::Arc { from, to } => {
                c[0] = from;
                c[1] = to;
                State {
                    shape: Shape::Arc,
                    len: 2,
                    c,
                }
            }
            HyperPoint::FullCircle => State {
                shape: Shape::FullCircle,
                len: 0,
                c,
            },
        })
    }

    /// Coordinates of a point in a grid keyed by 1-Lipschitz functions of the state.
    ///
    /// Two states at Hausdorff distance `< eps` have every probe within `eps`.
    #[inline]
    pub fn probes(&self, space: Space) -> [f64; 3] {
        match (self.shape, space) {
            (Shape::Interval, _) => [self.c[0], self.c[1], 0.0],
            (Shape::Set, Space::Interval) => {
                // sorted: min and max are 1-Lipschitz for the Hausdorff metric
                let v = self.coords();
                let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let mid = v.iter().map(|&x| (x - 0.5).abs()).fold(f64::INFINITY, f64::min);
                [lo, hi, mid]
            }
            (Shape::Set, Space::Circle) => {
                let v = self.coords();
                let near = |r: f64| v.iter().map(|&x| space.distance(x, r)).fold(f64::INFINITY, f64::min);
                [near(0.0), near(1.0 / 3.0), near(2.0 / 3.0)]
            }
            (Shape::Arc | Shape::FullCircle, _) => {
                let a = self.arc_ref();
                let near = |r: f64| match a {
                    ArcRef::Full => 0.0,
                    ArcRef::Arc(p, q) => {
                        if crate::hyperspace::arc_contains(p, q, r) {
                            0.0
                        } else {
                            Space::Circle.distance(r, p).min(Space::Circle.distance(r, q))
                        }
                    }
                };
                [near(0.0), near(1.0 / 3.0), near(2.0 / 3.0)]
            }
        }
    }
}
