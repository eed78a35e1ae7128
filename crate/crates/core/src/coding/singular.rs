use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::letters::{point_text, Family, LetterRegion, Prepared};
use super::CodingError;
use crate::dynamics1d::{Homeo1D, Space};
use crate::entropy::{wandering_intervals, DynSystem, LatticeSpec, OrbitCloud};
use crate::hyperspace::{HyperPoint, StateSpace};

/// Outcome of a search for mutually singular behaviour of two regions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum SingularityVerdict {
    /// `F^{n1}(witness) ∈ U1`, `F^{n2}(witness) ∈ U2` and `|n1 - n2| > M`.
    MutuallySingular {
        #[serde(with = "point_text")]
        witness: HyperPoint,
        n1: usize,
        n2: usize,
    },
    NotSingular {
        reason: String,
    },
    /// Nothing found up to this many steps; try a longer horizon.
    Inconclusive {
        horizon: usize,
    },
}

/// Looks for a state visiting `u1` and `u2` more than `m` steps apart.
///
/// The search first walks a lattice cloud: its states are built from orbit
/// pieces pulled back from near one region and pushed forward towards the
/// other, so long transits show up as soon as the horizon allows them. `extra`
/// is scanned next. Every hit is replayed with the induced map before it is
/// reported. Failing that, the regions are projected to an endpoint coordinate
/// that the dynamics carries along; if every orbit through both projections
/// needs at most `m` steps between them the answer is `NotSingular`.
pub fn check_singular(
    sys: &DynSystem,
    u1: &LetterRegion,
    u2: &LetterRegion,
    m: usize,
    horizon: usize,
    extra: Option<&OrbitCloud>,
) -> Result<SingularityVerdict, CodingError> {
    let fam = Family::new(sys, vec![u1.clone(), u2.clone()])?;
    let spec = LatticeSpec {
        phases: 2,
        ..LatticeSpec::default()
    };
    let lattice = OrbitCloud::lattice(sys, &spec, horizon)?;
    for cloud in std::iter::once(&lattice).chain(extra) {
        if let Some(v) = scan(sys, &fam, cloud, m, horizon.min(cloud.horizon())) {
            return Ok(v);
        }
    }
    if let Some(reason) = transit_certificate(sys, u1, u2, m) {
        return Ok(SingularityVerdict::NotSingular { reason });
    }
    Ok(SingularityVerdict::Inconclusive { horizon })
}

fn scan(sys: &DynSystem, fam: &Family, cloud: &OrbitCloud, m: usize, horizon: usize) -> Option<SingularityVerdict> {
    let (p1, p2) = (fam.prepared(0), fam.prepared(1));
    (0..cloud.len()).into_par_iter().find_map_first(|i| {
        let mut first = [usize::MAX; 2];
        let mut last = [0usize; 2];
        for t in 1..=horizon {
            let st = cloud.state(i, t);
            for (k, p) in [p1, p2].into_iter().enumerate() {
                if p.contains(&st) {
                    first[k] = first[k].min(t);
                    last[k] = t;
                }
            }
        }
        if first[0] == usize::MAX || first[1] == usize::MAX {
            return None;
        }
        for (t1, t2) in [(first[0], last[1]), (last[0], first[1])] {
            if t1.abs_diff(t2) <= m {
                continue;
            }
            let s = t1.min(t2) - 1;
            let x = cloud.hyperpoint(i, s);
            if replay(sys, fam, &x, t1 - s, t2 - s) {
                return Some(SingularityVerdict::MutuallySingular {
                    witness: x,
                    n1: t1 - s,
                    n2: t2 - s,
                });
            }
        }
        None
    })
}

fn replay(sys: &DynSystem, fam: &Family, x: &HyperPoint, n1: usize, n2: usize) -> bool {
    let space = sys.space();
    let mut p = x.clone();
    let mut ok = [false; 2];
    for t in 1..=n1.max(n2) {
        p = match sys.step(&p) {
            Ok(q) => q,
            Err(_) => return false,
        };
        if t == n1 {
            ok[0] = fam.letters()[0].region.contains(space, &p);
        }
        if t == n2 {
            ok[1] = fam.letters()[1].region.contains(space, &p);
        }
    }
    ok[0] && ok[1]
}

/// Ranges of the two coordinates that the induced map moves by `f`: interval
/// or arc endpoints, or the extreme points of a set in the interval.
fn coordinate_ranges(kind: StateSpace, r: &LetterRegion) -> [Option<(f64, f64)>; 2] {
    let space = kind.space();
    let lift = |lo: f64, hi: f64| {
        if space == Space::Circle && lo > hi {
            (lo, hi + 1.0)
        } else {
            (lo, hi)
        }
    };
    match r {
        LetterRegion::Span { lo, hi } => {
            let v = Some(lift(*lo, *hi));
            [v, v]
        }
        LetterRegion::Box { lo, hi } => {
            let k = lo.len();
            match kind {
                StateSpace::Base(_) if k == 1 => [Some(lift(lo[0], hi[0])); 2],
                StateSpace::Continuum(_) if k == 2 => [Some(lift(lo[0], hi[0])), Some(lift(lo[1], hi[1]))],
                StateSpace::Symmetric(Space::Interval, _) => [Some((lo[0], hi[0])), Some((lo[k - 1], hi[k - 1]))],
                _ => [None, None],
            }
        }
        LetterRegion::Ball { center, radius: r } => {
            let around = |x: f64| Some((x - r, x + r));
            match center {
                HyperPoint::Interval { lo, hi } => [around(*lo), around(*hi)],
                HyperPoint::Arc { from, to } => {
                    // Hausdorff-close arcs have close endpoints once the gap exceeds 2r.
                    let gap = 1.0 - (to - from).rem_euclid(1.0);
                    if gap > 2.0 * r && from != to {
                        [around(*from), around(*to)]
                    } else {
                        [None, None]
                    }
                }
                HyperPoint::Finite(v) if v.len() == 1 => [around(v[0]), around(v[0])],
                HyperPoint::Finite(v) if space == Space::Interval => [around(v[0]), around(v[v.len() - 1])],
                _ => [None, None],
            }
        }
    }
}

#[derive(Debug, PartialEq)]
enum Transit {
    Never,
    Within(usize),
    Unknown,
}

/// Time shifts `n` with `f^n([a1, b1]) ∩ [a2, b2] ≠ ∅`, for ranges inside
/// wandering intervals.
fn transit(f: &Homeo1D, fixed: &[f64], v1: (f64, f64), v2: (f64, f64)) -> Transit {
    let space = f.space();
    let intervals = wandering_intervals(space, fixed);
    // Position of a range inside a wandering interval, in coordinates measured from its left end.
    let locate = |(a, b): (f64, f64)| -> Option<(usize, f64, f64)> {
        if !(b > a) || b - a >= 1.0 {
            return None;
        }
        for (j, &(lo, hi)) in intervals.iter().enumerate() {
            let u = match space {
                Space::Interval => a - lo,
                Space::Circle => (a - lo).rem_euclid(1.0),
            };
            if u > 0.0 && u + (b - a) < hi - lo {
                return Some((j, u, u + (b - a)));
            }
        }
        None
    };
    let (Some((j1, _, _)), Some((j2, c2, d2))) = (locate(v1), locate(v2)) else {
        return Transit::Unknown;
    };
    if j1 != j2 {
        return Transit::Never;
    }
    let (lo, hi) = intervals[j1];
    let coord = |x: f64| match space {
        Space::Interval => x - lo,
        Space::Circle => (x - lo).rem_euclid(1.0),
    };
    let mid = lo + (hi - lo) / 2.0;
    let up = coord(f.apply(space.normalize(mid))) > coord(mid);
    let inv = f.invert();
    let mut worst: Option<usize> = None;
    for (g, ahead) in [(f, up), (&inv, !up)] {
        let (mut a, mut b) = (space.normalize(v1.0), space.normalize(v1.1));
        for n in 0..100_000usize {
            let (u, w) = (coord(a), coord(b));
            if u <= d2 && w >= c2 {
                worst = Some(worst.map_or(n, |k| k.max(n)));
            }
            if (ahead && u > d2) || (!ahead && w < c2) {
                break;
            }
            if n + 1 == 100_000 {
                return Transit::Unknown;
            }
            a = g.apply(a);
            b = g.apply(b);
        }
    }
    match worst {
        None => Transit::Never,
        Some(k) => Transit::Within(k),
    }
}

fn transit_certificate(sys: &DynSystem, u1: &LetterRegion, u2: &LetterRegion, m: usize) -> Option<String> {
    let r1 = coordinate_ranges(sys.kind(), u1);
    let r2 = coordinate_ranges(sys.kind(), u2);
    for c in 0..2 {
        let (Some(v1), Some(v2)) = (r1[c], r2[c]) else { continue };
        match transit(sys.map(), sys.fixed_points(), v1, v2) {
            Transit::Never => return Some(format!("no orbit meets both regions (coordinate {c})")),
            Transit::Within(k) if k <= m => {
                return Some(format!(
                    "visits to the two regions are at most {k} steps apart (coordinate {c})"
                ))
            }
            _ => {}
        }
    }
    None
}

/// Smallest `L ≤ horizon` such that for every `n` in `[L, horizon]` some cloud
/// state in `y1` at time 0 lies in `y2` at time `n`.
pub fn eq2_condition(
    sys: &DynSystem,
    y1: &LetterRegion,
    y2: &LetterRegion,
    cloud: &OrbitCloud,
    horizon: usize,
) -> Result<Option<usize>, CodingError> {
    if cloud.kind() != sys.kind() {
        return Err(CodingError::Config("cloud and system live in different spaces".into()));
    }
    if horizon > cloud.horizon() {
        return Err(CodingError::Config(format!(
            "horizon {horizon} exceeds the cloud horizon {}",
            cloud.horizon()
        )));
    }
    let fam = Family::new(sys, vec![y1.clone(), y2.clone()])?;
    let (p1, p2): (&Prepared, &Prepared) = (fam.prepared(0), fam.prepared(1));
    let reached = (0..cloud.len())
        .into_par_iter()
        .filter(|&i| p1.contains(&cloud.state(i, 0)))
        .map(|i| {
            (0..=horizon)
                .map(|n| p2.contains(&cloud.state(i, n)))
                .collect::<Vec<bool>>()
        })
        .reduce(
            || vec![false; horizon + 1],
            |a, b| a.iter().zip(&b).map(|(x, y)| *x || *y).collect(),
        );
    if !reached[horizon] {
        return Ok(None);
    }
    let gap = reached.iter().rposition(|&r| !r);
    Ok(Some(gap.map_or(0, |g| g + 1)))
}
