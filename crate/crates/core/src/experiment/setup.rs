//! Clouds, budgets and coding letters for each target.

use serde::{Deserialize, Serialize};

use super::ExperimentError;
use crate::coding::LetterRegion;
use crate::dynamics1d::{Homeo1D, Orientation, Space};
use crate::entropy::{wandering_intervals, DynSystem, LatticeSpec, OrbitCloud, DEFAULT_EPS_LIST, DEFAULT_N_LIST};
use crate::hyperspace::{sample_region, HyperPoint, Region};

/// Cloud and window parameters of one estimate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Budget {
    pub phases: usize,
    pub resolution: f64,
    pub n_list: Vec<usize>,
    pub eps_list: Vec<f64>,
}

impl Budget {
    /// Base space: a fine grid and long windows.
    pub fn base() -> Self {
        Budget {
            phases: 32,
            resolution: 1e-4,
            n_list: DEFAULT_N_LIST.to_vec(),
            eps_list: DEFAULT_EPS_LIST.to_vec(),
        }
    }

    pub fn continuum(space: Space) -> Self {
        match space {
            Space::Interval => Budget {
                phases: 2,
                resolution: 5e-3,
                n_list: vec![16, 32, 64, 128, 256],
                eps_list: vec![0.4, 0.2],
            },
            Space::Circle => Budget {
                phases: 1,
                resolution: 0.02,
                n_list: vec![32, 64, 128, 256],
                eps_list: vec![0.3],
            },
        }
    }

    /// `k`-point sets; the packing cost grows fast with `k`, so larger `k`
    /// gets coarser grids, shorter windows and fewer scales.
    pub fn symmetric(k: usize) -> Self {
        match k {
            1 => Self::base(),
            2 => Budget {
                phases: 2,
                resolution: 0.02,
                n_list: vec![32, 64, 128, 256],
                eps_list: vec![0.4, 0.25],
            },
            3 => Budget {
                phases: 1,
                resolution: 0.05,
                n_list: vec![32, 64, 128],
                eps_list: vec![0.4],
            },
            _ => Budget {
                phases: 1,
                resolution: 0.1,
                n_list: vec![16, 32, 64],
                eps_list: vec![0.45],
            },
        }
    }

    pub fn with_overrides(
        mut self,
        resolution: Option<f64>,
        n_list: Option<&Vec<usize>>,
        eps_list: Option<&Vec<f64>>,
        phases: Option<usize>,
    ) -> Self {
        if let Some(r) = resolution {
            self.resolution = r;
        }
        if let Some(n) = n_list {
            self.n_list = n.clone();
        }
        if let Some(e) = eps_list {
            self.eps_list = e.clone();
        }
        if let Some(p) = phases {
            self.phases = p;
        }
        self
    }

    /// Scales and grid step multiplied by `s`, for a piece of diameter about `s`.
    pub fn scaled(mut self, s: f64) -> Self {
        self.resolution *= s;
        for e in &mut self.eps_list {
            *e *= s;
        }
        self
    }

    pub fn horizon(&self) -> usize {
        *self.n_list.last().unwrap_or(&1)
    }
}

/// Which part of the state space a cloud covers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Restrict {
    All,
    /// Every coordinate in `[lo, hi]`.
    Span(f64, f64),
    /// Arcs admitted by a circle region.
    Arcs(Region),
    /// Intervals `[x, y]` with `x` and `y` in the given closed ranges.
    Ends((f64, f64), (f64, f64)),
}

impl Restrict {
    fn keeps(self, p: &HyperPoint) -> bool {
        match self {
            Restrict::All => true,
            Restrict::Span(lo, hi) => coords(p).iter().all(|&x| lo <= x && x <= hi),
            Restrict::Arcs(r) => r.admits_arc(p),
            Restrict::Ends(a, b) => match p {
                HyperPoint::Interval { lo, hi } => a.0 <= *lo && *lo <= a.1 && b.0 <= *hi && *hi <= b.1,
                _ => false,
            },
        }
    }
}

fn coords(p: &HyperPoint) -> Vec<f64> {
    match p {
        HyperPoint::Finite(v) => v.to_vec(),
        HyperPoint::Interval { lo, hi } => vec![*lo, *hi],
        HyperPoint::Arc { from, to } => vec![*from, *to],
        HyperPoint::FullCircle => Vec::new(),
    }
}

/// Lattice orbits merged with a uniform grid of `region`, both cut down to `restrict`.
pub fn build_cloud(
    sys: &DynSystem,
    region: Region,
    restrict: Restrict,
    budget: &Budget,
) -> Result<OrbitCloud, ExperimentError> {
    let horizon = budget.horizon();
    let spec = LatticeSpec {
        phases: budget.phases,
        restrict: match restrict {
            Restrict::Span(lo, hi) => Some((lo, hi)),
            _ => None,
        },
        ..LatticeSpec::default()
    };
    let mut lattice = OrbitCloud::lattice(sys, &spec, horizon)?;
    if restrict != Restrict::All {
        lattice.retain(|p| restrict.keeps(p));
    }
    let mut grid = sample_region(region, budget.resolution)?;
    grid.points.retain(|p| restrict.keeps(p));
    if sys.space() == Space::Circle {
        // interval grids end at 1, which is 0 again
        grid.points.retain(|p| coords(p).iter().all(|&x| x < 1.0));
    }
    if grid.points.is_empty() {
        return Ok(lattice);
    }
    let grid = OrbitCloud::from_samples(sys, &grid, horizon)?;
    Ok(lattice.merge(grid)?)
}

/// A wandering interval `(lo, hi)` of the base map (circle: `hi` may exceed 1)
/// with its motion.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Wandering {
    pub lo: f64,
    pub hi: f64,
    /// Points move toward `lo`.
    pub down: bool,
    /// Fundamental domain `(d0, d1]`.
    pub d0: f64,
    pub d1: f64,
}

impl Wandering {
    pub fn all(f: &Homeo1D) -> Vec<Wandering> {
        let space = f.space();
        wandering_intervals(space, &f.fixed_points())
            .into_iter()
            .map(|(lo, hi)| {
                let c = lo + (hi - lo) / 2.0;
                let fc = match space {
                    Space::Interval => f.apply(c),
                    Space::Circle => lo + (f.lift(c) - lo).rem_euclid(1.0),
                };
                Wandering {
                    lo,
                    hi,
                    down: fc < c,
                    d0: c.min(fc),
                    d1: c.max(fc),
                }
            })
            .collect()
    }

    /// Width of the end neighbourhoods, small against the gaps between the
    /// fundamental domain and the ends.
    fn margin(&self) -> f64 {
        let room = (self.d0 - self.lo).min(self.hi - self.d1);
        (0.05 * (self.hi - self.lo)).min(room / 2.0)
    }

    fn fundamental(&self, space: Space) -> (f64, f64) {
        (wrap(space, self.d0), wrap(space, self.d1))
    }

    fn near(&self, space: Space, end: f64) -> (f64, f64) {
        let w = self.margin();
        (wrap(space, end - w), wrap(space, end + w))
    }

    fn omega(&self) -> f64 {
        if self.down {
            self.lo
        } else {
            self.hi
        }
    }

    fn alpha(&self) -> f64 {
        if self.down {
            self.hi
        } else {
            self.lo
        }
    }
}

fn wrap(space: Space, x: f64) -> f64 {
    match space {
        Space::Interval => x,
        Space::Circle => x.rem_euclid(1.0),
    }
}

/// One letter per wandering interval: its fundamental domain.
pub fn base_letters(f: &Homeo1D) -> Vec<LetterRegion> {
    Wandering::all(f)
        .iter()
        .map(|w| {
            let (lo, hi) = w.fundamental(f.space());
            LetterRegion::Span { lo, hi }
        })
        .collect()
}

/// Two letters on intervals (or arcs) with both ends in `w`.
///
/// The end that reaches the attracting side first is the leader. `Y1` holds
/// states whose leader crosses the fundamental domain while the other end is
/// still near the repelling fixed point, `Y2` the states whose other end
/// crosses it after the leader has arrived. Orbits pass `Y1` and later `Y2`
/// with any gap between the two visits.
pub fn continuum_letters(space: Space, w: &Wandering) -> (LetterRegion, LetterRegion) {
    let d = w.fundamental(space);
    let a = w.near(space, w.alpha());
    let o = w.near(space, w.omega());
    // coordinates are (lower end, upper end) along the interval
    let (y1, y2) = if w.down { ((d, a), (o, d)) } else { ((a, d), (d, o)) };
    let mk = |(c0, c1): ((f64, f64), (f64, f64))| LetterRegion::Box {
        lo: vec![c0.0, c1.0],
        hi: vec![c0.1, c1.1],
    };
    (mk(y1), mk(y2))
}

/// `k` letters on `k`-point sets: letter `j` holds the sets whose `j`-th
/// smallest point is in the fundamental domain, the smaller ones below it and
/// the larger ones above it.
pub fn symmetric_letters(w: &Wandering, k: usize) -> Vec<LetterRegion> {
    (0..k)
        .map(|j| {
            let mut lo = Vec::with_capacity(k);
            let mut hi = Vec::with_capacity(k);
            for i in 0..k {
                let (a, b) = match i.cmp(&j) {
                    std::cmp::Ordering::Less => (-1.0, w.d0),
                    std::cmp::Ordering::Equal => (w.d0, w.d1),
                    std::cmp::Ordering::Greater => (w.d1, 2.0),
                };
                lo.push(a);
                hi.push(b);
            }
            LetterRegion::Box { lo, hi }
        })
        .collect()
}

/// `f` restricted to the invariant interval `[lo, hi]` (on the circle, of the
/// lift, `hi ≤ lo + 1`), rescaled to `[0, 1]`.
pub fn restrict_map(f: &Homeo1D, lo: f64, hi: f64) -> Result<Homeo1D, ExperimentError> {
    let shift = (f.lift(lo) - lo).round();
    let g = |x: f64| f.lift(x) - shift;
    let len = hi - lo;
    let mut pts = vec![(0.0, 0.0)];
    let xs: Vec<f64> = f.breakpoints().map(|b| b.0).collect();
    let mut inner: Vec<f64> = Vec::new();
    let start = lo.floor() as i64 - 1;
    for m in start..=start + 3 {
        for &x in &xs {
            let y = x + m as f64;
            if y > lo && y < hi {
                inner.push(y);
            }
        }
    }
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    for x in inner {
        pts.push(((x - lo) / len, (g(x) - lo) / len));
    }
    pts.push((1.0, 1.0));
    Ok(Homeo1D::checked(Space::Interval, Orientation::Preserving, &pts)?)
}

/// An orientation-preserving power of `f` with a nonempty finite fixed set:
/// `f` itself, its square when reversing, or the first power of that with
/// fixed points.
pub fn usable_power(f: &Homeo1D) -> Result<(Homeo1D, u32), ExperimentError> {
    let (g, base) = match f.orientation() {
        Orientation::Preserving => (f.clone(), 1),
        Orientation::Reversing => (f.power(2)?, 2),
    };
    for m in 1..=64u32 {
        let h = if m == 1 { g.clone() } else { g.power(m)? };
        if h.validate().is_err() {
            return Err(ExperimentError::Map(format!(
                "f^{} has a non-finite fixed set; the non-wandering set is not finite",
                m * base
            )));
        }
        if !h.fixed_points().is_empty() {
            return Ok((h, m * base));
        }
    }
    Err(ExperimentError::Map("no power up to 64 has a fixed point".into()))
}
