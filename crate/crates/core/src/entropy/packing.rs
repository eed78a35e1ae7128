use rustc_hash::FxHashMap;

use super::cloud::OrbitCloud;
use super::system::{DynSystem, Shape, State};
use crate::dynamics1d::Space;
use crate::hyperspace::StateSpace;

/// Per-point data for one `(n, eps)` pass.
#[derive(Clone, Copy, Debug)]
struct Info {
    /// Active times, clipped to the window; empty when `lo == hi`.
    lo: usize,
    hi: usize,
    /// Fixed state followed before `lo` and after `hi`.
    pre: u16,
    post: u16,
    peak_t: usize,
    peak: f64,
}

/// Greedy first-fit `(n, eps)`-separated subsets of an orbit cloud.
///
/// A candidate is compared only with witnesses that could be within `eps` of it
/// for the whole window. Two facts make that search exact:
///
/// * `h`, the distance to the fixed states, is 1-Lipschitz. A witness within
///   `eps` of a candidate at a time where the candidate has `h ≥ 2 eps` has
///   `h ≥ eps` there, so indexing witnesses by `(t, grid cell)` at every such
///   time finds it. Candidates that never reach `2 eps` are compared with the
///   witnesses that never reach `3 eps`.
/// * Away from its active window a state stays within `delta < eps/2` of one
///   fixed state, so two states shadowing the same fixed state are closer
///   than `eps` there and only the active windows need scanning.
pub struct Packer<'a> {
    sys: &'a DynSystem,
    cloud: &'a OrbitCloud,
    fixed: Vec<State>,
    probes: usize,
}

pub(crate) struct Pass<'p, 'a> {
    packer: &'p Packer<'a>,
    n: usize,
    eps: f64,
    table: Vec<Option<(i64, i64)>>,
    exact_windows: bool,
}

impl<'a> Packer<'a> {
    pub fn new(sys: &'a DynSystem, cloud: &'a OrbitCloud) -> Self {
        let fixed = sys
            .fixed_hyperpoints()
            .iter()
            .filter_map(State::from_hyperpoint)
            .collect();
        let probes = match sys.kind() {
            StateSpace::Base(Space::Interval) => 1,
            StateSpace::Continuum(Space::Interval) => 2,
            _ => 3,
        };
        Packer {
            sys,
            cloud,
            fixed,
            probes,
        }
    }

    pub(crate) fn pass(&self, n: usize, eps: f64) -> Pass<'_, 'a> {
        // Quiet stretches follow one fixed state only if a step cannot carry a
        // state from near one fixed state to near another.
        let sep = self.sys.fixed_separation();
        let lip = self.sys.lipschitz().max(1.0);
        let mut delta = 0.45 * eps;
        if sep.is_finite() {
            delta = delta.min(0.95 * sep / (lip + 1.0));
        }
        let table = self.cloud.bank().activity_table(delta);
        Pass {
            packer: self,
            n,
            eps,
            table,
            exact_windows: !self.fixed.is_empty(),
        }
    }

    /// Greedy packing for window `n` and scale `eps`, starting from `seed`
    /// (which must already be `(n, eps)`-separated) and visiting candidates in `order`.
    pub fn pack(&self, n: usize, eps: f64, seed: &[u32], order: &[u32]) -> Vec<u32> {
        let pass = self.pass(n, eps);
        let mut index = Index::new(self.probes);
        let mut infos: Vec<Info> = Vec::new();
        let mut chosen = seed.to_vec();
        let mut member = vec![false; self.cloud.len()];
        for (slot, &w) in seed.iter().enumerate() {
            member[w as usize] = true;
            let info = pass.info(w as usize);
            pass.insert(&mut index, slot as u32, w as usize, &info);
            infos.push(info);
        }
        let times = pass.sample_times();
        let mut sketches: Vec<f64> = Vec::new();
        for &w in seed {
            pass.sketch(w as usize, &times, &mut sketches);
        }
        let mut mine: Vec<f64> = Vec::new();
        let width = times.len() * 3;
        let mut scratch = Vec::new();
        for &c in order {
            let ci = c as usize;
            if member[ci] || self.cloud.points()[ci].rank as usize > n {
                continue;
            }
            let info = pass.info(ci);
            scratch.clear();
            if info.peak >= 2.0 * eps {
                let st = self.cloud.state(ci, info.peak_t);
                index.neighbours(info.peak_t, &st.probes(self.cloud.space()), eps, &mut scratch);
            } else {
                scratch.extend_from_slice(&index.quiet);
            }
            mine.clear();
            pass.sketch(ci, &times, &mut mine);
            let conflict = scratch.iter().any(|&slot| {
                let theirs = &sketches[slot as usize * width..(slot as usize + 1) * width];
                // probes are 1-Lipschitz: a probe gap of eps already separates
                let apart = mine.iter().zip(theirs).any(|(a, b)| (a - b).abs() >= eps);
                !apart && pass.close(ci, &info, chosen[slot as usize] as usize, &infos[slot as usize])
            });
            if !conflict {
                let slot = chosen.len() as u32;
                member[ci] = true;
                sketches.extend_from_slice(&mine);
                chosen.push(c);
                pass.insert(&mut index, slot, ci, &info);
                infos.push(info);
            }
        }
        chosen
    }
}

impl Pass<'_, '_> {
    /// 1-Lipschitz distance to the fixed states.
    #[inline]
    fn h(&self, i: usize, t: usize) -> f64 {
        let cloud = self.packer.cloud;
        match cloud.points()[i].shape {
            Shape::Set | Shape::Interval => cloud.coord_activity(i, t),
            Shape::Arc | Shape::FullCircle => {
                let st = cloud.state(i, t);
                self.packer
                    .fixed
                    .iter()
                    .map(|q| st.distance(Space::Circle, q))
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }

    /// Up to sixteen times spread over the window.
    fn sample_times(&self) -> Vec<usize> {
        let k = self.n.min(16);
        let mut v: Vec<usize> = (0..k).map(|j| j * (self.n - 1) / (k - 1).max(1)).collect();
        v.dedup();
        v
    }

    fn sketch(&self, i: usize, times: &[usize], out: &mut Vec<f64>) {
        let cloud = self.packer.cloud;
        for &t in times {
            out.extend_from_slice(&cloud.state(i, t).probes(cloud.space()));
        }
    }

    fn nearest_fixed(&self, i: usize, t: usize) -> u16 {
        let st = self.packer.cloud.state(i, t);
        let space = self.packer.cloud.space();
        let mut best = (f64::INFINITY, 0u16);
        for (k, q) in self.packer.fixed.iter().enumerate() {
            let d = st.distance(space, q);
            if d < best.0 {
                best = (d, k as u16);
            }
        }
        best.1
    }

    fn info(&self, i: usize) -> Info {
        let n = self.n;
        let (lo, hi) = if self.exact_windows {
            match self.packer.cloud.active_window(i, &self.table) {
                Some((a, b)) => (a.clamp(0, n as i64) as usize, b.clamp(0, n as i64) as usize),
                None => (n, n),
            }
        } else {
            (0, n)
        };
        let (lo, hi) = if lo >= hi { (n, n) } else { (lo, hi) };
        let (pre, post) = if self.exact_windows {
            let pre = if lo > 0 { self.nearest_fixed(i, 0) } else { 0 };
            let post = if hi < n { self.nearest_fixed(i, hi) } else { 0 };
            // An empty window is one quiet stretch.
            if lo == n {
                (pre, pre)
            } else {
                (pre, post)
            }
        } else {
            (0, 0)
        };
        let mut peak = 0.0;
        let mut peak_t = lo.min(n - 1);
        for t in lo..hi {
            let g = self.h(i, t);
            if g > peak {
                peak = g;
                peak_t = t;
            }
        }
        Info {
            lo,
            hi,
            pre,
            post,
            peak_t,
            peak,
        }
    }

    fn insert(&self, index: &mut Index, slot: u32, i: usize, info: &Info) {
        if info.peak < 3.0 * self.eps {
            index.quiet.push(slot);
        }
        let space = self.packer.cloud.space();
        for t in info.lo..info.hi {
            if self.h(i, t) >= self.eps {
                let st = self.packer.cloud.state(i, t);
                index.add(t, &st.probes(space), self.eps, slot);
            }
        }
    }

    #[inline]
    fn separated_on(&self, a: usize, b: usize, from: usize, to: usize) -> bool {
        let cloud = self.packer.cloud;
        let space = cloud.space();
        (from..to).any(|t| cloud.state(a, t).distance(space, &cloud.state(b, t)) >= self.eps)
    }

    /// Whether `d_n(a, b) < eps`.
    fn close(&self, a: usize, ia: &Info, b: usize, ib: &Info) -> bool {
        let n = self.n;
        let lo = ia.lo.min(ib.lo);
        let hi = ia.hi.max(ib.hi);
        let (lo, hi) = if lo >= hi { (n, n) } else { (lo, hi) };
        if self.separated_on(a, b, lo, hi) {
            return false;
        }
        if lo > 0 && ia.pre != ib.pre && self.separated_on(a, b, 0, lo) {
            return false;
        }
        if hi < n && ia.post != ib.post && self.separated_on(a, b, hi, n) {
            return false;
        }
        true
    }
}

/// Witness slots keyed by time and probe cell.
struct Index {
    probes: usize,
    cells: FxHashMap<u64, Vec<u32>>,
    quiet: Vec<u32>,
}

impl Index {
    fn new(probes: usize) -> Self {
        Index {
            probes,
            cells: FxHashMap::default(),
            quiet: Vec::new(),
        }
    }

    #[inline]
    fn key(t: usize, cell: &[i64]) -> u64 {
        let mut k = t as u64;
        for &c in cell {
            k = (k << 16) | ((c + 2) as u64 & 0xffff);
        }
        k
    }

    fn add(&mut self, t: usize, probes: &[f64; 3], eps: f64, slot: u32) {
        let mut cell = [0i64; 3];
        for k in 0..self.probes {
            cell[k] = (probes[k] / eps).floor() as i64;
        }
        self.cells
            .entry(Self::key(t, &cell[..self.probes]))
            .or_default()
            .push(slot);
    }

    fn neighbours(&self, t: usize, probes: &[f64; 3], eps: f64, out: &mut Vec<u32>) {
        let mut base = [0i64; 3];
        for k in 0..self.probes {
            base[k] = (probes[k] / eps).floor() as i64;
        }
        let total = 3usize.pow(self.probes as u32);
        let mut cell = [0i64; 3];
        for code in 0..total {
            let mut c = code;
            for k in 0..self.probes {
                cell[k] = base[k] + (c % 3) as i64 - 1;
                c /= 3;
            }
            if let Some(v) = self.cells.get(&Self::key(t, &cell[..self.probes])) {
                out.extend_from_slice(v);
            }
        }
    }
}
