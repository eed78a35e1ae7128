use serde::{Deserialize, Serialize};
use std::fmt;

use super::scalar::{abs, Exact, Scalar};
use super::{MapError, Violation};

/// The phase space of a one-dimensional map.
///
/// `Interval` is `[0,1]` with `|x - y|`; `Circle` is `[0,1)` with `0 ≡ 1` and
/// the arc-length metric `min(|x-y|, 1-|x-y|)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Space {
    Interval,
    Circle,
}

impl Space {
    #[inline]
    pub fn distance(self, x: f64, y: f64) -> f64 {
        match self {
            Space::Interval => (x - y).abs(),
            Space::Circle => {
                let d = (x - y).abs().rem_euclid(1.0);
                d.min(1.0 - d)
            }
        }
    }

    /// Reduce a coordinate into the fundamental domain. Circle ties at 1 become 0.
    #[inline]
    pub fn normalize(self, x: f64) -> f64 {
        match self {
            Space::Interval => x,
            Space::Circle => {
                let r = x.rem_euclid(1.0);
                if r >= 1.0 {
                    0.0
                } else {
                    r
                }
            }
        }
    }

    pub fn contains(self, x: f64) -> bool {
        match self {
            Space::Interval => (0.0..=1.0).contains(&x),
            Space::Circle => x.is_finite(),
        }
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Space::Interval => f.write_str("interval"),
            Space::Circle => f.write_str("circle"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Preserving,
    Reversing,
}

impl Orientation {
    fn degree(self) -> f64 {
        match self {
            Orientation::Preserving => 1.0,
            Orientation::Reversing => -1.0,
        }
    }

    fn compose(self, other: Orientation) -> Orientation {
        if self == other {
            Orientation::Preserving
        } else {
            Orientation::Reversing
        }
    }
}

/// Forward and backward limits of an orbit, both fixed points of the map.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitLimit {
    /// ω-limit: `x` lies in the stable manifold of this point.
    pub forward: f64,
    /// α-limit.
    pub backward: f64,
}

/// A piecewise-linear homeomorphism of the interval or the circle.
///
/// Breakpoints `(x_i, y_i)` have `x_0 = 0`, `x_m = 1`. On the circle the `y_i`
/// are values of a degree ±1 lift `G` with `G(x+1) = G(x) ± 1`, so they may lie
/// outside `[0,1]`; images are read modulo 1.
///
/// Construction only checks that the data is well formed; call
/// [`Homeo1D::validate`] (or use [`Homeo1D::checked`]) before evaluating.
#[derive(Clone, Debug)]
pub struct Homeo1D {
    space: Space,
    orientation: Orientation,
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
    exact: Option<Vec<(Exact, Exact)>>,
}

impl PartialEq for Homeo1D {
    fn eq(&self, other: &Self) -> bool {
        self.space == other.space && self.orientation == other.orientation && self.xs == other.xs && self.ys == other.ys
    }
}

impl Homeo1D {
    pub fn new(space: Space, orientation: Orientation, breakpoints: &[(f64, f64)]) -> Result<Self, MapError> {
        if breakpoints.len() < 2 {
            return Err(MapError::Invalid(vec![Violation::TooFewBreakpoints {
                found: breakpoints.len(),
            }]));
        }
        let xs: Vec<f64> = breakpoints.iter().map(|b| b.0).collect();
        let ys: Vec<f64> = breakpoints.iter().map(|b| b.1).collect();
        Ok(Self::from_parts(space, orientation, xs, ys, None))
    }

    /// Build from exact rational breakpoints, retaining them for validation and reporting.
    pub fn new_exact(
        space: Space,
        orientation: Orientation,
        breakpoints: Vec<(Exact, Exact)>,
    ) -> Result<Self, MapError> {
        if breakpoints.len() < 2 {
            return Err(MapError::Invalid(vec![Violation::TooFewBreakpoints {
                found: breakpoints.len(),
            }]));
        }
        let xs = breakpoints.iter().map(|b| b.0.to_f64()).collect();
        let ys = breakpoints.iter().map(|b| b.1.to_f64()).collect();
        Ok(Self::from_parts(space, orientation, xs, ys, Some(breakpoints)))
    }

    /// `new` followed by `validate`.
    pub fn checked(space: Space, orientation: Orientation, breakpoints: &[(f64, f64)]) -> Result<Self, MapError> {
        let f = Self::new(space, orientation, breakpoints)?;
        f.validate().map_err(MapError::Invalid)?;
        Ok(f)
    }

    fn from_parts(
        space: Space,
        orientation: Orientation,
        xs: Vec<f64>,
        ys: Vec<f64>,
        exact: Option<Vec<(Exact, Exact)>>,
    ) -> Self {
        let slopes = xs
            .windows(2)
            .zip(ys.windows(2))
            .map(|(x, y)| (y[1] - y[0]) / (x[1] - x[0]))
            .collect();
        Homeo1D {
            space,
            orientation,
            xs,
            ys,
            slopes,
            exact,
        }
    }

    pub fn identity(space: Space) -> Self {
        Self::from_parts(
            space,
            Orientation::Preserving,
            vec![0.0, 1.0],
            vec![0.0, 1.0],
            Some(vec![
                (Exact::from_int(0), Exact::from_int(0)),
                (Exact::from_int(1), Exact::from_int(1)),
            ]),
        )
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn is_preserving(&self) -> bool {
        self.orientation == Orientation::Preserving
    }

    pub fn breakpoints(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.ys.iter().copied())
    }

    pub fn exact_breakpoints(&self) -> Option<&[(Exact, Exact)]> {
        self.exact.as_deref()
    }

    /// Checks every structural invariant; violations are reported, never raised.
    pub fn validate(&self) -> Result<(), Vec<Violation>> {
        let mut out = Vec::new();
        for (i, (&x, &y)) in self.xs.iter().zip(&self.ys).enumerate() {
            if !x.is_finite() || !y.is_finite() {
                out.push(Violation::NonFinite { index: i });
            }
        }
        if !out.is_empty() {
            return Err(out);
        }
        match &self.exact {
            Some(bp) => {
                let xs: Vec<Exact> = bp.iter().map(|b| b.0).collect();
                let ys: Vec<Exact> = bp.iter().map(|b| b.1).collect();
                check_shape(self.space, self.orientation, &xs, &ys, &mut out);
            }
            None => check_shape(self.space, self.orientation, &self.xs, &self.ys, &mut out),
        }
        if out.is_empty() {
            Ok(())
        } else {
            Err(out)
        }
    }

    #[inline]
    fn segment(&self, x: f64) -> usize {
        let last = self.xs.len() - 2;
        if self.xs.len() <= 4 {
            // Few breakpoints: a linear scan beats the binary search.
            let mut i = 0;
            while i < last && x >= self.xs[i + 1] {
                i += 1;
            }
            i
        } else {
            self.xs.partition_point(|&b| b <= x).saturating_sub(1).min(last)
        }
    }

    /// Value of the lift on the unit domain `[0,1]`.
    #[inline]
    fn lift_unit(&self, x: f64) -> f64 {
        let i = self.segment(x);
        if x == self.xs[i] {
            return self.ys[i];
        }
        if x == self.xs[i + 1] {
            return self.ys[i + 1];
        }
        self.ys[i] + self.slopes[i] * (x - self.xs[i])
    }

    /// The lift `G` at any real argument (circle), or the map itself (interval).
    pub fn lift(&self, x: f64) -> f64 {
        match self.space {
            Space::Interval => self.lift_unit(x),
            Space::Circle => {
                let j = x.floor();
                self.lift_unit(x - j) + self.orientation.degree() * j
            }
        }
    }

    /// Evaluate without a domain check. Interval inputs must lie in `[0,1]`.
    #[inline]
    pub fn apply(&self, x: f64) -> f64 {
        match self.space {
            Space::Interval => self.lift_unit(x),
            Space::Circle => {
                let x = self.space.normalize(x);
                self.space.normalize(self.lift_unit(x))
            }
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64, MapError> {
        if !self.space.contains(x) {
            return Err(MapError::Domain { x, space: self.space });
        }
        Ok(self.apply(x))
    }

    /// The inverse homeomorphism, obtained by swapping breakpoint coordinates.
    pub fn invert(&self) -> Homeo1D {
        match self.space {
            Space::Interval => {
                let mut pts: Vec<(f64, f64)> = self.breakpoints().map(|(x, y)| (y, x)).collect();
                let mut exact: Option<Vec<(Exact, Exact)>> =
                    self.exact.as_ref().map(|bp| bp.iter().map(|&(x, y)| (y, x)).collect());
                if self.orientation == Orientation::Reversing {
                    pts.reverse();
                    if let Some(e) = exact.as_mut() {
                        e.reverse();
                    }
                }
                let (xs, ys) = pts.into_iter().unzip();
                Self::from_parts(self.space, self.orientation, xs, ys, exact)
            }
            Space::Circle => self.invert_circle(),
        }
    }

    fn invert_circle(&self) -> Homeo1D {
        match &self.exact {
            Some(bp) => {
                let xs: Vec<Exact> = bp.iter().map(|b| b.0).collect();
                let ys: Vec<Exact> = bp.iter().map(|b| b.1).collect();
                let inv = invert_lift(&xs, &ys, self.orientation);
                let (fx, fy) = inv.iter().map(|&(u, v)| (u.to_f64(), v.to_f64())).unzip();
                Self::from_parts(self.space, self.orientation, fx, fy, Some(inv))
            }
            None => {
                let inv = invert_lift(&self.xs, &self.ys, self.orientation);
                let (xs, ys) = inv.into_iter().unzip();
                Self::from_parts(self.space, self.orientation, xs, ys, None)
            }
        }
    }

    /// `f^n(x)`; negative `n` iterates the inverse.
    pub fn iterate(&self, x: f64, n: i64) -> f64 {
        if n >= 0 {
            (0..n).fold(x, |z, _| self.apply(z))
        } else {
            let inv = self.invert();
            (0..-n).fold(x, |z, _| inv.apply(z))
        }
    }

    /// All solutions of `f(x) = x` in increasing order (circle: in `[0,1)`).
    pub fn fixed_points(&self) -> Vec<f64> {
        match &self.exact {
            Some(_) => self
                .fixed_points_exact()
                .unwrap_or_default()
                .into_iter()
                .map(|v| v.to_f64())
                .collect(),
            None => solve_fixed(self.space, &self.xs, &self.ys),
        }
    }

    /// Exact fixed points when the map carries rational breakpoints.
    pub fn fixed_points_exact(&self) -> Option<Vec<Exact>> {
        let bp = self.exact.as_ref()?;
        let xs: Vec<Exact> = bp.iter().map(|b| b.0).collect();
        let ys: Vec<Exact> = bp.iter().map(|b| b.1).collect();
        Some(solve_fixed(self.space, &xs, &ys))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Homeo1D) -> Result<Homeo1D, MapError> {
        if self.space != other.space {
            return Err(MapError::SpaceMismatch);
        }
        let orientation = self.orientation.compose(other.orientation);
        let inner_inv = other.invert();
        let mut knots: Vec<f64> = other.xs.clone();
        match self.space {
            Space::Interval => {
                knots.extend(self.xs.iter().map(|&b| inner_inv.apply(b)));
            }
            Space::Circle => {
                // Preimages of the outer breakpoints, taken modulo 1.
                for &b in &self.xs {
                    knots.push(inner_inv.space.normalize(inner_inv.apply(b)));
                }
                knots.push(1.0);
            }
        }
        knots.sort_by(f64::total_cmp);
        knots.dedup();
        let pts: Vec<(f64, f64)> = match self.space {
            Space::Interval => knots.iter().map(|&x| (x, self.apply(other.apply(x)))).collect(),
            Space::Circle => knots.iter().map(|&x| (x, self.lift(other.lift(x)))).collect(),
        };
        let mut f = Homeo1D::new(self.space, orientation, &pts)?;
        f.simplify();
        Ok(f)
    }

    /// `f^m` for `m ≥ 1`.
    pub fn power(&self, m: u32) -> Result<Homeo1D, MapError> {
        if m == 0 {
            return Ok(Homeo1D::identity(self.space));
        }
        let mut acc = self.clone();
        for _ in 1..m {
            acc = self.compose(&acc)?;
        }
        Ok(acc)
    }

    /// `f` itself when preserving, otherwise `f²`.
    pub fn preserving_power(&self) -> Result<Homeo1D, MapError> {
        match self.orientation {
            Orientation::Preserving => Ok(self.clone()),
            Orientation::Reversing => self.power(2),
        }
    }

    /// Drop interior breakpoints where the slope does not change.
    fn simplify(&mut self) {
        let mut xs = vec![self.xs[0]];
        let mut ys = vec![self.ys[0]];
        for i in 1..self.xs.len() - 1 {
            let s_in = self.slopes[i - 1];
            let s_out = self.slopes[i];
            if (s_in - s_out).abs() > 1e-12 * s_in.abs().max(1.0) {
                xs.push(self.xs[i]);
                ys.push(self.ys[i]);
            }
        }
        xs.push(*self.xs.last().unwrap());
        ys.push(*self.ys.last().unwrap());
        *self = Self::from_parts(self.space, self.orientation, xs, ys, None);
    }

    /// Nearest fixed points of the forward and backward orbit of `x` after `horizon` steps.
    pub fn orbit_limits(&self, x: f64, tol: f64, horizon: u32) -> Result<OrbitLimit, MapError> {
        if self.orientation == Orientation::Reversing {
            return Err(MapError::Reversing);
        }
        let fixed = self.fixed_points();
        if fixed.is_empty() {
            return Err(MapError::NoFixedPoints);
        }
        let nearest = |z: f64| -> (f64, f64) {
            fixed
                .iter()
                .map(|&p| (p, self.space.distance(p, z)))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap()
        };
        let fwd = self.iterate(x, horizon as i64);
        let bwd = self.iterate(x, -(horizon as i64));
        let (p, dp) = nearest(fwd);
        let (q, dq) = nearest(bwd);
        if dp >= tol || dq >= tol {
            return Err(MapError::Convergence {
                x,
                horizon,
                residual: dp.max(dq),
            });
        }
        Ok(OrbitLimit {
            forward: p,
            backward: q,
        })
    }

    /// Distance from `x` to the nearest fixed point in `fixed`.
    pub fn distance_to_set(&self, x: f64, fixed: &[f64]) -> f64 {
        fixed
            .iter()
            .map(|&p| self.space.distance(p, x))
            .fold(f64::INFINITY, f64::min)
    }
}

fn check_shape<T: Scalar>(space: Space, orientation: Orientation, xs: &[T], ys: &[T], out: &mut Vec<Violation>) {
    let m = xs.len() - 1;
    if xs[0] != T::zero() {
        out.push(Violation::DomainStart { found: xs[0].to_f64() });
    }
    if xs[m] != T::one() {
        out.push(Violation::DomainEnd { found: xs[m].to_f64() });
    }
    for i in 0..m {
        if xs[i + 1] <= xs[i] {
            out.push(Violation::AbscissaeNotIncreasing { index: i + 1 });
        }
        match orientation {
            Orientation::Preserving if ys[i + 1] <= ys[i] => {
                out.push(Violation::NotMonotoneIncreasing { index: i + 1 })
            }
            Orientation::Reversing if ys[i + 1] >= ys[i] => out.push(Violation::NotMonotoneDecreasing { index: i + 1 }),
            _ => {}
        }
    }
    match (space, orientation) {
        (Space::Interval, Orientation::Preserving) => {
            if ys[0] != T::zero() || ys[m] != T::one() {
                out.push(Violation::Endpoints {
                    expected: (0.0, 1.0),
                    found: (ys[0].to_f64(), ys[m].to_f64()),
                });
            }
        }
        (Space::Interval, Orientation::Reversing) => {
            if ys[0] != T::one() || ys[m] != T::zero() {
                out.push(Violation::Endpoints {
                    expected: (1.0, 0.0),
                    found: (ys[0].to_f64(), ys[m].to_f64()),
                });
            }
        }
        (Space::Circle, o) => {
            let want = match o {
                Orientation::Preserving => T::one(),
                Orientation::Reversing => -T::one(),
            };
            if ys[m] - ys[0] != want {
                out.push(Violation::Degree {
                    found: (ys[m] - ys[0]).to_f64(),
                });
            }
        }
    }
    // Only meaningful once the segments are well ordered.
    if out.is_empty() {
        for i in 0..m {
            let h0 = ys[i] - xs[i];
            let h1 = ys[i + 1] - xs[i + 1];
            let on_diagonal = match space {
                Space::Interval => h0 == T::zero() && h1 == T::zero(),
                Space::Circle => h0 == h1 && h0 == h0.floor(),
            };
            if on_diagonal {
                out.push(Violation::NonFiniteFixedSet { segment: i });
            }
        }
    }
}

/// Fixed points of a validated PL map: breakpoints on the (shifted) diagonal
/// plus interior crossings of each segment, each counted once.
fn solve_fixed<T: Scalar>(space: Space, xs: &[T], ys: &[T]) -> Vec<T> {
    let m = xs.len() - 1;
    let h: Vec<T> = xs.iter().zip(ys).map(|(&x, &y)| y - x).collect();
    let is_int = |v: T| match space {
        Space::Interval => v == T::zero(),
        Space::Circle => v == v.floor(),
    };
    let mut out = Vec::new();
    // On the circle x_m ≡ x_0.
    let last = if space == Space::Circle { m } else { m + 1 };
    for i in 0..last {
        if is_int(h[i]) {
            out.push(xs[i]);
        }
    }
    for i in 0..m {
        let (a, b) = (h[i], h[i + 1]);
        if a == b {
            continue;
        }
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let targets: Vec<T> = match space {
            Space::Interval => {
                if lo < T::zero() && T::zero() < hi {
                    vec![T::zero()]
                } else {
                    vec![]
                }
            }
            Space::Circle => {
                let mut j = lo.floor() + T::one();
                let mut v = Vec::new();
                while j < hi {
                    v.push(j);
                    j = j + T::one();
                }
                v
            }
        };
        for j in targets {
            let t = (j - a) / (b - a);
            out.push(xs[i] + t * (xs[i + 1] - xs[i]));
        }
    }
    out.sort_by(|p, q| p.partial_cmp(q).unwrap());
    out.dedup_by(|p, q| abs(*p - *q) == T::zero());
    out
}

/// Breakpoints of the inverse lift of a circle map, rebased to `[0,1]`.
fn invert_lift<T: Scalar>(xs: &[T], ys: &[T], orientation: Orientation) -> Vec<(T, T)> {
    let m = xs.len() - 1;
    let deg = match orientation {
        Orientation::Preserving => T::one(),
        Orientation::Reversing => -T::one(),
    };
    let (ymin, ymax) = if ys[0] < ys[m] { (ys[0], ys[m]) } else { (ys[m], ys[0]) };
    // Inverse lift H on [ymin, ymax] (an interval of length 1), extended by H(u+1) = H(u) + deg.
    let h_at = |u: T| -> T {
        let j = (u - ymin).floor();
        let v = u - j;
        let mut x = T::zero();
        for i in 0..m {
            let (a, b) = (ys[i], ys[i + 1]);
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            if v >= lo && v <= hi {
                x = if v == a {
                    xs[i]
                } else if v == b {
                    xs[i + 1]
                } else {
                    xs[i] + (v - a) / (b - a) * (xs[i + 1] - xs[i])
                };
                break;
            }
        }
        let _ = ymax;
        // G(x + k) = G(x) + deg·k, so H(v + j) = H(v) + deg·j.
        x + deg * j
    };
    let mut knots: Vec<T> = vec![T::zero(), T::one()];
    for &y in ys {
        let f = y - y.floor();
        knots.push(f);
    }
    knots.sort_by(|p, q| p.partial_cmp(q).unwrap());
    knots.dedup_by(|p, q| *p == *q);
    knots.into_iter().map(|u| (u, h_at(u))).collect()
}
