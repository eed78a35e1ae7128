use rustc_hash::FxHashMap;

use super::system::{DynSystem, Shape, State};
use super::EntropyError;
use crate::dynamics1d::{Homeo1D, Space};
use crate::hyperspace::{HyperPoint, SampleCloud, StateSpace};

/// Orbits are cut once they come this close to a fixed point; later values are
/// read as the fixed point itself.
const SETTLED: f64 = 1e-13;

/// A stored orbit segment `x_j = f^j(seed)` for `j` in `[-origin, len - origin)`.
#[derive(Clone, Debug)]
struct Orbit {
    origin: i64,
    values: Vec<f64>,
    dist: Vec<f64>,
    alpha: f64,
    omega: f64,
}

/// Orbits shared by the points of a cloud.
#[derive(Clone, Debug, Default)]
pub struct OrbitBank {
    orbits: Vec<Orbit>,
}

impl OrbitBank {
    pub fn len(&self) -> usize {
        self.orbits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orbits.is_empty()
    }

    /// `f^j(seed)` of orbit `o`.
    #[inline]
    pub fn value(&self, o: u32, j: i64) -> f64 {
        let orb = &self.orbits[o as usize];
        let idx = orb.origin + j;
        if idx < 0 {
            orb.alpha
        } else if idx as usize >= orb.values.len() {
            orb.omega
        } else {
            orb.values[idx as usize]
        }
    }

    /// Range of `j` where the orbit is at least `delta` away from the fixed points.
    fn active(&self, o: u32, delta: f64) -> Option<(i64, i64)> {
        let orb = &self.orbits[o as usize];
        let first = orb.dist.iter().position(|&d| d >= delta)?;
        let last = orb.dist.iter().rposition(|&d| d >= delta)?;
        Some((first as i64 - orb.origin, last as i64 - orb.origin))
    }

    /// `active` for every orbit.
    pub(crate) fn activity_table(&self, delta: f64) -> Vec<Option<(i64, i64)>> {
        (0..self.orbits.len() as u32).map(|o| self.active(o, delta)).collect()
    }

    /// First and last stored `j` of orbit `o`; values outside are the limits.
    fn span(&self, o: u32) -> (i64, i64) {
        let orb = &self.orbits[o as usize];
        (-orb.origin, orb.values.len() as i64 - orb.origin - 1)
    }

    /// Distance of `f^j(seed)` to the fixed points.
    #[inline]
    pub fn dist(&self, o: u32, j: i64) -> f64 {
        let orb = &self.orbits[o as usize];
        let idx = orb.origin + j;
        if idx < 0 || idx as usize >= orb.dist.len() {
            0.0
        } else {
            orb.dist[idx as usize]
        }
    }

    /// Store the orbit of `seed` for `j` in `[-back, fwd]`, stopping early once settled.
    fn push(&mut self, f: &Homeo1D, inv: &Homeo1D, fixed: &[f64], seed: f64, back: i64, fwd: i64) -> u32 {
        let space = f.space();
        let dist = |x: f64| {
            fixed
                .iter()
                .map(|&p| space.distance(p, x))
                .fold(f64::INFINITY, f64::min)
        };
        let nearest = |x: f64| {
            fixed
                .iter()
                .copied()
                .min_by(|a, b| space.distance(*a, x).total_cmp(&space.distance(*b, x)))
                .unwrap_or(x)
        };
        let walk = |g: &Homeo1D, steps: i64| -> (Vec<f64>, f64) {
            let mut out = Vec::new();
            let mut x = seed;
            for _ in 0..steps {
                let y = g.apply(x);
                if y == x {
                    return (out, x);
                }
                if dist(y) < SETTLED {
                    return (out, nearest(y));
                }
                out.push(y);
                x = y;
            }
            // The caller never reads past `steps`; the limit value is a placeholder.
            (out, x)
        };
        let (mut bwd, alpha) = walk(inv, back);
        let (fwd_vals, omega) = walk(f, fwd);
        let origin = bwd.len() as i64;
        bwd.reverse();
        bwd.push(seed);
        bwd.extend(fwd_vals);
        let d = bwd.iter().map(|&x| dist(x)).collect();
        self.orbits.push(Orbit {
            origin,
            values: bwd,
            dist: d,
            alpha,
            omega,
        });
        (self.orbits.len() - 1) as u32
    }

    fn push_fixed(&mut self, p: f64) -> u32 {
        self.orbits.push(Orbit {
            origin: 0,
            values: vec![p],
            dist: vec![0.0],
            alpha: p,
            omega: p,
        });
        (self.orbits.len() - 1) as u32
    }
}

/// A coordinate of a cloud point: at time `t` it equals `f^{t - shift}` of the
/// orbit seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Track {
    pub orbit: u32,
    pub shift: i32,
}

/// One starting state of a cloud.
#[derive(Clone, Copy, Debug)]
pub struct CloudPoint {
    pub shape: Shape,
    pub len: u8,
    pub tracks: [Track; 4],
    /// Smallest window length for which the point belongs to the cloud.
    pub rank: u32,
}

/// Finite set of starting states whose orbits are read from a shared bank.
#[derive(Clone, Debug)]
pub struct OrbitCloud {
    space: Space,
    kind: StateSpace,
    bank: OrbitBank,
    points: Vec<CloudPoint>,
    horizon: usize,
    resolution: f64,
    /// Arc points whose endpoints were cut at the same fixed point, with the
    /// time ranges where the arc is really the full circle minus a sliver.
    long_arcs: FxHashMap<u32, Vec<(usize, usize)>>,
}

/// Seeding of a lattice cloud: `phases` orbits per wandering interval, started
/// evenly in a fundamental domain, each shifted so that it enters the window at
/// every possible time.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeSpec {
    pub phases: usize,
    /// Shifts start and end where the orbit is within `tail` of the fixed set.
    pub tail: f64,
    /// Extra orbit seeds, each used with every shift.
    pub seeds: Vec<f64>,
    /// Only seed wandering intervals inside this range of the base space.
    pub restrict: Option<(f64, f64)>,
    /// Add the fixed points as constant coordinates.
    pub include_fixed: bool,
}

impl Default for LatticeSpec {
    fn default() -> Self {
        LatticeSpec {
            phases: 8,
            tail: 1e-3,
            seeds: Vec::new(),
            restrict: None,
            include_fixed: true,
        }
    }
}

impl OrbitCloud {
    pub fn space(&self) -> Space {
        self.space
    }

    pub fn kind(&self) -> StateSpace {
        self.kind
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn points(&self) -> &[CloudPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn bank(&self) -> &OrbitBank {
        &self.bank
    }

    /// Number of points used for a window of length `n`.
    pub fn size_at(&self, n: usize) -> usize {
        self.points.iter().filter(|p| p.rank as usize <= n).count()
    }

    /// State of point `i` at time `t`.
    #[inline]
    pub fn state(&self, i: usize, t: usize) -> State {
        let p = &self.points[i];
        let mut c = [0.0; 4];
        for k in 0..p.len as usize {
            let tr = p.tracks[k];
            c[k] = self.bank.value(tr.orbit, t as i64 - tr.shift as i64);
        }
        if p.shape == Shape::Arc && c[0] == c[1] {
            if let Some(runs) = self.long_arcs.get(&(i as u32)) {
                if runs.iter().any(|&(a, b)| a <= t && t <= b) {
                    return State {
                        shape: Shape::FullCircle,
                        len: 0,
                        c: [0.0; 4],
                    };
                }
            }
        }
        State {
            shape: p.shape,
            len: p.len,
            c,
        }
    }

    /// Arc endpoints read from cut orbits can coincide although the true arc
    /// wraps almost all the way round. The true length never reaches 0 or 1, so
    /// each run of coinciding times takes its regime from the nearest time where
    /// the endpoints differ.
    fn mark_long_arcs(&mut self) {
        self.long_arcs.clear();
        let bank = &self.bank;
        let at = |tr: Track, t: i64| bank.value(tr.orbit, t - tr.shift as i64);
        for (i, p) in self.points.iter().enumerate() {
            if p.shape != Shape::Arc || p.tracks[0] == p.tracks[1] {
                continue;
            }
            let (a, b) = (p.tracks[0], p.tracks[1]);
            let (sa, sb) = (bank.span(a.orbit), bank.span(b.orbit));
            let t_min = (sa.0 + a.shift as i64).min(sb.0 + b.shift as i64) - 1;
            let t_max = (sa.1 + a.shift as i64).max(sb.1 + b.shift as i64) + 1;
            let length = |t: i64| (at(b, t) - at(a, t)).rem_euclid(1.0);
            let mut runs = Vec::new();
            let mut t = 0usize;
            while t <= self.horizon {
                if at(a, t as i64) != at(b, t as i64) {
                    t += 1;
                    continue;
                }
                let start = t;
                while t <= self.horizon && at(a, t as i64) == at(b, t as i64) {
                    t += 1;
                }
                let end = t - 1;
                let before = (t_min..start as i64).rev().find(|&u| at(a, u) != at(b, u));
                let after = (end as i64 + 1..=t_max).find(|&u| at(a, u) != at(b, u));
                if let Some(u) = before.or(after) {
                    if length(u) > 0.5 {
                        runs.push((start, end));
                    }
                }
            }
            if !runs.is_empty() {
                self.long_arcs.insert(i as u32, runs);
            }
        }
    }

    pub fn hyperpoint(&self, i: usize, t: usize) -> HyperPoint {
        self.state(i, t).to_hyperpoint()
    }

    /// Times `[a, b)` outside of which every coordinate of point `i` is within
    /// `delta` of Fix, given the orbit table from [`OrbitBank::activity_table`].
    #[inline]
    pub(crate) fn active_window(&self, i: usize, table: &[Option<(i64, i64)>]) -> Option<(i64, i64)> {
        let p = &self.points[i];
        let mut win: Option<(i64, i64)> = None;
        for k in 0..p.len as usize {
            let tr = p.tracks[k];
            if let Some((j0, j1)) = table[tr.orbit as usize] {
                let (a, b) = (j0 + tr.shift as i64, j1 + tr.shift as i64 + 1);
                win = Some(match win {
                    None => (a, b),
                    Some((x, y)) => (x.min(a), y.max(b)),
                });
            }
        }
        win
    }

    /// Largest coordinate distance to the fixed points of point `i` at time `t`.
    #[inline]
    pub(crate) fn coord_activity(&self, i: usize, t: usize) -> f64 {
        let p = &self.points[i];
        let mut g = 0.0f64;
        for k in 0..p.len as usize {
            let tr = p.tracks[k];
            g = g.max(self.bank.dist(tr.orbit, t as i64 - tr.shift as i64));
        }
        g
    }

    /// Cloud whose orbits start at the points of a sample grid.
    pub fn from_samples(sys: &DynSystem, cloud: &SampleCloud, horizon: usize) -> Result<Self, EntropyError> {
        let mut out = OrbitCloud {
            space: sys.space(),
            kind: sys.kind(),
            bank: OrbitBank::default(),
            points: Vec::with_capacity(cloud.points.len()),
            horizon,
            resolution: cloud.resolution,
            long_arcs: FxHashMap::default(),
        };
        let f = sys.map();
        let inv = f.invert();
        let fixed = sys.fixed_points();
        let mut seen: FxHashMap<u64, u32> = FxHashMap::default();
        for p in &cloud.points {
            if !sys.kind().admits(p) {
                return Err(EntropyError::Mismatch(format!("{p} is not a state of {}", sys.kind())));
            }
            let st = State::from_hyperpoint(p)
                .ok_or_else(|| EntropyError::Mismatch("at most four coordinates per state".into()))?;
            let mut tracks = [Track::default(); 4];
            for (k, &x) in st.coords().iter().enumerate() {
                let key = x.to_bits();
                let o = match seen.get(&key) {
                    Some(&o) => o,
                    None => {
                        let o = out.bank.push(f, &inv, fixed, x, 0, horizon as i64);
                        seen.insert(key, o);
                        o
                    }
                };
                tracks[k] = Track { orbit: o, shift: 0 };
            }
            out.points.push(CloudPoint {
                shape: st.shape,
                len: st.len,
                tracks,
                rank: 0,
            });
        }
        out.mark_long_arcs();
        Ok(out)
    }

    /// Lattice cloud for windows up to `horizon`; see [`LatticeSpec`].
    pub fn lattice(sys: &DynSystem, spec: &LatticeSpec, horizon: usize) -> Result<Self, EntropyError> {
        let f = sys.map();
        let inv = f.invert();
        let space = sys.space();
        let fixed = sys.fixed_points().to_vec();
        if fixed.is_empty() {
            return Err(EntropyError::Mismatch(
                "lattice clouds need at least one fixed point".into(),
            ));
        }
        let dist = |x: f64| {
            fixed
                .iter()
                .map(|&p| space.distance(p, x))
                .fold(f64::INFINITY, f64::min)
        };

        // Seeds: fundamental domains of every wandering interval, plus extras.
        let mut seeds: Vec<f64> = Vec::new();
        for (lo, hi) in wandering_intervals(space, &fixed) {
            if let Some((r0, r1)) = spec.restrict {
                if lo < r0 || hi > r1 {
                    continue;
                }
            }
            let c = lo + (hi - lo) / 2.0;
            // image of c in the same wandering interval
            let fc = match space {
                Space::Interval => f.apply(c),
                Space::Circle => lo + (f.lift(c) - lo).rem_euclid(1.0),
            };
            for i in 0..spec.phases {
                let s = c + (fc - c) * (i as f64 + 0.5) / spec.phases as f64;
                seeds.push(space.normalize(s));
            }
        }
        seeds.extend(spec.seeds.iter().map(|&s| space.normalize(s)));
        seeds.retain(|&s| dist(s) > 0.0);

        // Margins: steps until the seeds are within `tail` of the fixed set.
        let steps_to_tail = |g: &Homeo1D| -> i64 {
            let mut worst = 0;
            for &s in &seeds {
                let mut x = s;
                let mut k = 0;
                while dist(x) >= spec.tail && k < 100_000 {
                    x = g.apply(x);
                    k += 1;
                }
                worst = worst.max(k);
            }
            worst
        };
        let m_fwd = steps_to_tail(f);
        let m_bwd = steps_to_tail(&inv);
        let n = horizon as i64;

        let mut bank = OrbitBank::default();
        let mut tracks: Vec<(Track, u32)> = Vec::new();
        for &s in &seeds {
            let o = bank.push(f, &inv, &fixed, s, n + m_bwd + 1, n + m_fwd + 1);
            for shift in -m_fwd..=n + m_bwd {
                let rank = (shift - m_bwd).max(0) as u32;
                tracks.push((
                    Track {
                        orbit: o,
                        shift: shift as i32,
                    },
                    rank,
                ));
            }
        }
        if spec.include_fixed {
            for &p in &fixed {
                if let Some((r0, r1)) = spec.restrict {
                    if !(r0..=r1).contains(&p) {
                        continue;
                    }
                }
                let o = bank.push_fixed(p);
                tracks.push((Track { orbit: o, shift: 0 }, 0));
            }
        }
        // Order coordinates by their value at time 0, which is preserved by the dynamics.
        let value0 = |t: &Track| bank.value(t.orbit, -(t.shift as i64));
        tracks.sort_by(|a, b| value0(&a.0).total_cmp(&value0(&b.0)));

        let mut points = Vec::new();
        let mk = |shape: Shape, ts: &[(Track, u32)]| {
            let mut arr = [Track::default(); 4];
            let mut rank = 0;
            for (k, (t, r)) in ts.iter().enumerate() {
                arr[k] = *t;
                rank = rank.max(*r);
            }
            CloudPoint {
                shape,
                len: ts.len() as u8,
                tracks: arr,
                rank,
            }
        };
        match sys.kind() {
            StateSpace::Base(_) | StateSpace::Symmetric(_, 1) => {
                for t in &tracks {
                    points.push(mk(Shape::Set, &[*t]));
                }
            }
            StateSpace::Continuum(Space::Interval) => {
                for i in 0..tracks.len() {
                    for j in i..tracks.len() {
                        points.push(mk(Shape::Interval, &[tracks[i], tracks[j]]));
                    }
                }
            }
            StateSpace::Continuum(Space::Circle) => {
                for i in 0..tracks.len() {
                    for j in 0..tracks.len() {
                        points.push(mk(Shape::Arc, &[tracks[i], tracks[j]]));
                    }
                }
                points.push(CloudPoint {
                    shape: Shape::FullCircle,
                    len: 0,
                    tracks: [Track::default(); 4],
                    rank: 0,
                });
            }
            StateSpace::Symmetric(_, k) => {
                if k > 4 {
                    return Err(EntropyError::Mismatch("lattice clouds support k <= 4".into()));
                }
                let mut idx: Vec<usize> = (0..k).collect();
                if tracks.len() >= k {
                    loop {
                        let ts: Vec<(Track, u32)> = idx.iter().map(|&i| tracks[i]).collect();
                        points.push(mk(Shape::Set, &ts));
                        // next k-combination in lexicographic order
                        let mut i = k;
                        while i > 0 && idx[i - 1] == tracks.len() - k + i - 1 {
                            i -= 1;
                        }
                        if i == 0 {
                            break;
                        }
                        idx[i - 1] += 1;
                        for j in i..k {
                            idx[j] = idx[j - 1] + 1;
                        }
                    }
                }
            }
        }
        let mut out = OrbitCloud {
            space,
            kind: sys.kind(),
            bank,
            points,
            horizon,
            resolution: 0.0,
            long_arcs: FxHashMap::default(),
        };
        out.mark_long_arcs();
        Ok(out)
    }

    /// Union of two clouds over the same system.
    pub fn merge(mut self, other: OrbitCloud) -> Result<Self, EntropyError> {
        if self.kind != other.kind {
            return Err(EntropyError::Mismatch("clouds of different state spaces".into()));
        }
        let off = self.bank.orbits.len() as u32;
        self.bank.orbits.extend(other.bank.orbits);
        for mut p in other.points {
            for k in 0..p.len as usize {
                p.tracks[k].orbit += off;
            }
            self.points.push(p);
        }
        self.horizon = self.horizon.min(other.horizon);
        self.resolution = if self.resolution == 0.0 {
            other.resolution
        } else if other.resolution == 0.0 {
            self.resolution
        } else {
            self.resolution.max(other.resolution)
        };
        self.mark_long_arcs();
        Ok(self)
    }

    /// Keep only the points accepted by `keep` (evaluated on the state at time 0).
    pub fn retain<F: Fn(&HyperPoint) -> bool>(&mut self, keep: F) {
        let flags: Vec<bool> = (0..self.points.len()).map(|i| keep(&self.hyperpoint(i, 0))).collect();
        let mut k = 0;
        self.points.retain(|_| {
            k += 1;
            flags[k - 1]
        });
        self.mark_long_arcs();
    }
}

/// Maximal open intervals between consecutive fixed points, as `(lo, hi)` with
/// `lo < hi` (on the circle `hi` may exceed 1).
pub fn wandering_intervals(space: Space, fixed: &[f64]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    match space {
        Space::Interval => {
            for w in fixed.windows(2) {
                out.push((w[0], w[1]));
            }
        }
        Space::Circle => {
            for (i, &p) in fixed.iter().enumerate() {
                let q = if i + 1 < fixed.len() {
                    fixed[i + 1]
                } else {
                    fixed[0] + 1.0
                };
                out.push((p, q));
            }
        }
    }
    out
}
