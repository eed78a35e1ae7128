use serde::{Deserialize, Serialize};
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use super::metric::arc_contains;
use super::{Coords, HyperError, HyperPoint};
use crate::dynamics1d::Space;

/// Regions of a hyperspace that can be filled with a grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Region {
    /// The whole interval, as one-point sets.
    Base,
    /// `{[x,y] : 0 ≤ x ≤ y ≤ 1}` ⊆ C(I).
    Triangle,
    /// π(A(k)): nonempty subsets of the grid with at most `k` points.
    AkSimplex { k: usize },
    /// π(Â(k)): subsets with exactly `k` distinct grid points.
    AkStrict { k: usize },
    /// Arcs `[x→y]` with `x` between `a` and `y`, with the degenerate cases.
    CircleA { a: f64 },
    /// Arcs `[x→y]` with `y` between `a` and `x`, with the degenerate cases.
    CircleB { a: f64 },
    /// Arcs `[x→y]` with `x` on the arc `ci` and `y` on the arc `cj`.
    Dij { ci: (f64, f64), cj: (f64, f64) },
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Region::Base => f.write_str("base"),
            Region::Triangle => f.write_str("triangle"),
            Region::AkSimplex { k } => write!(f, "ak-simplex:{k}"),
            Region::AkStrict { k } => write!(f, "ak-strict:{k}"),
            Region::CircleA { a } => write!(f, "circle-a:{a}"),
            Region::CircleB { a } => write!(f, "circle-b:{a}"),
            Region::Dij { ci, cj } => write!(f, "dij:{}:{}:{}:{}", ci.0, ci.1, cj.0, cj.1),
        }
    }
}

impl FromStr for Region {
    type Err = HyperError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || HyperError::Parse(format!("unknown region {s:?}"));
        let mut parts = s.trim().split(':');
        let tag = parts.next().ok_or_else(bad)?;
        let nums: Vec<f64> = parts.map(|p| p.parse().map_err(|_| bad())).collect::<Result<_, _>>()?;
        let int = |v: f64| {
            if v >= 1.0 && v.fract() == 0.0 {
                Ok(v as usize)
            } else {
                Err(bad())
            }
        };
        match (tag, nums.as_slice()) {
            ("base", []) => Ok(Region::Base),
            ("triangle", []) => Ok(Region::Triangle),
            ("ak-simplex", &[k]) => Ok(Region::AkSimplex { k: int(k)? }),
            ("ak-strict", &[k]) => Ok(Region::AkStrict { k: int(k)? }),
            ("circle-a", &[a]) => Ok(Region::CircleA { a }),
            ("circle-b", &[a]) => Ok(Region::CircleB { a }),
            ("dij", &[a, b, c, d]) => Ok(Region::Dij { ci: (a, b), cj: (c, d) }),
            _ => Err(bad()),
        }
    }
}

impl Region {
    pub fn space(self) -> Space {
        match self {
            Region::Base | Region::Triangle | Region::AkSimplex { .. } | Region::AkStrict { .. } => Space::Interval,
            Region::CircleA { .. } | Region::CircleB { .. } | Region::Dij { .. } => Space::Circle,
        }
    }

    /// Membership of an arc (or the full circle) in `CircleA`/`CircleB`.
    pub fn admits_arc(self, p: &HyperPoint) -> bool {
        match (self, p) {
            (Region::CircleA { .. } | Region::CircleB { .. }, HyperPoint::FullCircle) => true,
            (Region::CircleA { a }, &HyperPoint::Arc { from, to }) => {
                let (u, v) = offsets(a, from, to);
                from == to || u <= v
            }
            (Region::CircleB { a }, &HyperPoint::Arc { from, to }) => {
                let (u, v) = offsets(a, from, to);
                if from == to {
                    u == 0.0
                } else {
                    // `v == 1` is `to == a`.
                    u == 0.0 || v == 1.0 || v < u
                }
            }
            (Region::Dij { ci, cj }, &HyperPoint::Arc { from, to }) => {
                arc_contains(ci.0, ci.1, from) && arc_contains(cj.0, cj.1, to)
            }
            _ => false,
        }
    }
}

/// Positions of `from` and `to` counterclockwise from `a`; `to == a` reads as 1,
/// the end of a full turn.
fn offsets(a: f64, from: f64, to: f64) -> (f64, f64) {
    let u = (from - a).rem_euclid(1.0);
    let v = (to - a).rem_euclid(1.0);
    (u, if v == 0.0 { 1.0 } else { v })
}

/// A finite grid of hyperpoints covering a region.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleCloud {
    pub region: Region,
    pub resolution: f64,
    pub points: Vec<HyperPoint>,
}

fn grid(space: Space, step: f64, origin: f64) -> Result<Vec<f64>, HyperError> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(HyperError::Invalid(format!("resolution {step} must be positive")));
    }
    let m = (1.0 / step).round() as usize;
    if m == 0 {
        return Err(HyperError::TooCoarse(step));
    }
    Ok(match space {
        Space::Interval => (0..=m).map(|i| i as f64 / m as f64).collect(),
        Space::Circle => (0..m)
            .map(|i| Space::Circle.normalize(origin + i as f64 / m as f64))
            .collect(),
    })
}

fn grid_on_arc(from: f64, to: f64, step: f64) -> Vec<f64> {
    let len = (to - from).rem_euclid(1.0);
    let m = (len / step).round().max(1.0) as usize;
    (0..=m)
        .map(|i| Space::Circle.normalize(from + len * i as f64 / m as f64))
        .collect()
}

fn subsets(g: &[f64], min: usize, max: usize, out: &mut Vec<HyperPoint>) {
    fn rec(g: &[f64], start: usize, cur: &mut Coords, min: usize, max: usize, out: &mut Vec<HyperPoint>) {
        if cur.len() >= min {
            out.push(HyperPoint::Finite(cur.clone()));
        }
        if cur.len() == max {
            return;
        }
        for i in start..g.len() {
            cur.push(g[i]);
            rec(g, i + 1, cur, min, max, out);
            cur.pop();
        }
    }
    rec(g, 0, &mut Coords::new(), min.max(1), max, out);
}

/// Grid of hyperpoints with the given step filling `region`.
///
/// Interval grids are `{0, 1/m, …, 1}` with `m = round(1/step)`; circle grids
/// start at the distinguished point of the region.
pub fn sample_region(region: Region, resolution: f64) -> Result<SampleCloud, HyperError> {
    let mut points = Vec::new();
    match region {
        Region::Base => {
            let g = grid(Space::Interval, resolution, 0.0)?;
            points.extend(g.iter().map(|&x| HyperPoint::singleton(x)));
        }
        Region::Triangle => {
            let g = grid(Space::Interval, resolution, 0.0)?;
            for (i, &x) in g.iter().enumerate() {
                for &y in &g[i..] {
                    points.push(HyperPoint::Interval { lo: x, hi: y });
                }
            }
        }
        Region::AkSimplex { k } => {
            let g = grid(Space::Interval, resolution, 0.0)?;
            subsets(&g, 1, k, &mut points);
        }
        Region::AkStrict { k } => {
            let g = grid(Space::Interval, resolution, 0.0)?;
            subsets(&g, k, k, &mut points);
        }
        Region::CircleA { a } | Region::CircleB { a } => {
            let g = grid(Space::Circle, resolution, a)?;
            for &x in &g {
                for &y in &g {
                    let p = HyperPoint::Arc { from: x, to: y };
                    if region.admits_arc(&p) {
                        points.push(p);
                    }
                }
            }
            points.push(HyperPoint::FullCircle);
        }
        Region::Dij { ci, cj } => {
            grid(Space::Circle, resolution, 0.0)?;
            let gi = grid_on_arc(ci.0, ci.1, resolution);
            let gj = grid_on_arc(cj.0, cj.1, resolution);
            for &x in &gi {
                for &y in &gj {
                    points.push(HyperPoint::Arc { from: x, to: y });
                }
            }
            // Shared endpoints of adjacent arcs can repeat a pair.
            dedup_points(&mut points);
        }
    }
    if points.is_empty() {
        return Err(HyperError::TooCoarse(resolution));
    }
    Ok(SampleCloud {
        region,
        resolution,
        points,
    })
}

fn dedup_points(points: &mut Vec<HyperPoint>) {
    let mut seen = rustc_hash::FxHashSet::default();
    points.retain(|p| seen.insert(p.to_string()));
}

impl SampleCloud {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// CSV export: a `# region=… resolution=…` line, then one `point` column.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<(), HyperError> {
        writeln!(w, "# region={} resolution={}", self.region, self.resolution)?;
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["point"])?;
        for p in &self.points {
            wr.write_record([p.to_string()])?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: BufRead>(mut r: R) -> Result<Self, HyperError> {
        let mut first = String::new();
        r.read_line(&mut first)?;
        let bad = || HyperError::Parse(format!("bad cloud header {:?}", first.trim()));
        let meta = first.trim().strip_prefix('#').ok_or_else(bad)?;
        let (mut region, mut resolution) = (None, None);
        for field in meta.split_whitespace() {
            match field.split_once('=') {
                Some(("region", v)) => region = Some(v.parse::<Region>()?),
                Some(("resolution", v)) => resolution = Some(v.parse::<f64>().map_err(|_| bad())?),
                _ => return Err(bad()),
            }
        }
        let (region, resolution) = (region.ok_or_else(bad)?, resolution.ok_or_else(bad)?);
        let mut rd = csv::Reader::from_reader(r);
        let mut points = Vec::new();
        for rec in rd.records() {
            let rec = rec?;
            let cell = rec.get(0).ok_or_else(bad)?;
            points.push(cell.parse()?);
        }
        Ok(SampleCloud {
            region,
            resolution,
            points,
        })
    }
}
