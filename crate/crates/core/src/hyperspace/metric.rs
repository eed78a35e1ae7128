use super::{HyperError, HyperPoint, StateSpace};
use crate::dynamics1d::{Homeo1D, Orientation, Space};

/// Hausdorff distance between two points of the same hyperspace.
pub fn hausdorff(space: Space, a: &HyperPoint, b: &HyperPoint) -> Result<f64, HyperError> {
    use HyperPoint::*;
    match (a, b) {
        (Interval { lo: l1, hi: h1 }, Interval { lo: l2, hi: h2 }) if space == Space::Interval => {
            Ok(interval_distance(*l1, *h1, *l2, *h2))
        }
        (Arc { .. } | FullCircle, Arc { .. } | FullCircle) if space == Space::Circle => {
            Ok(arc_distance(ArcRef::of(a), ArcRef::of(b)))
        }
        (Finite(x), Finite(y)) => Ok(finite_distance(space, x, y)),
        _ => Err(HyperError::Mismatch),
    }
}

#[inline]
pub fn interval_distance(lo1: f64, hi1: f64, lo2: f64, hi2: f64) -> f64 {
    (lo1 - lo2).abs().max((hi1 - hi2).abs())
}

/// Symmetric Hausdorff distance of two finite sets.
pub fn finite_distance(space: Space, a: &[f64], b: &[f64]) -> f64 {
    directed_finite(space, a, b).max(directed_finite(space, b, a))
}

#[inline]
fn directed_finite(space: Space, a: &[f64], b: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for &x in a {
        let mut best = f64::INFINITY;
        for &y in b {
            best = best.min(space.distance(x, y));
        }
        worst = worst.max(best);
    }
    worst
}

/// A closed connected subset of the circle: an arc or the whole circle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ArcRef {
    Arc(f64, f64),
    Full,
}

impl ArcRef {
    pub fn of(p: &HyperPoint) -> Self {
        match *p {
            HyperPoint::Arc { from, to } => ArcRef::Arc(from, to),
            _ => ArcRef::Full,
        }
    }
}

#[inline]
fn ccw(a: f64, b: f64) -> f64 {
    (b - a).rem_euclid(1.0)
}

/// Whether `p` lies on the counterclockwise arc `from → to`.
#[inline]
pub fn arc_contains(from: f64, to: f64, p: f64) -> bool {
    ccw(from, p) <= ccw(from, to)
}

#[inline]
fn point_to_arc(p: f64, from: f64, to: f64) -> f64 {
    if arc_contains(from, to, p) {
        0.0
    } else {
        Space::Circle.distance(p, from).min(Space::Circle.distance(p, to))
    }
}

/// `sup_{x ∈ a} d(x, b)`.
///
/// Off `b` the distance to `b` is a tent over the complementary gap, peaking at the
/// gap midpoint. So the supremum is either half the gap (when `a` covers the midpoint)
/// or is attained at an endpoint of `a`.
#[inline]
fn directed_arc(a: ArcRef, b: ArcRef) -> f64 {
    let (c, d) = match b {
        ArcRef::Full => return 0.0,
        ArcRef::Arc(c, d) => (c, d),
    };
    let gap = 1.0 - ccw(c, d);
    match a {
        ArcRef::Full => gap / 2.0,
        ArcRef::Arc(p, q) => {
            let mid = d + gap / 2.0;
            let peak = if arc_contains(p, q, mid) { gap / 2.0 } else { 0.0 };
            peak.max(point_to_arc(p, c, d)).max(point_to_arc(q, c, d))
        }
    }
}

/// Hausdorff distance between arcs (or the full circle) on the unit-length circle.
#[inline]
pub fn arc_distance(a: ArcRef, b: ArcRef) -> f64 {
    directed_arc(a, b).max(directed_arc(b, a))
}

/// Image of a continuum under `f`.
pub fn induce_continuum(f: &Homeo1D, a: &HyperPoint) -> Result<HyperPoint, HyperError> {
    let reversing = f.orientation() == Orientation::Reversing;
    match (f.space(), a) {
        (Space::Interval, &HyperPoint::Interval { lo, hi }) => {
            let (u, v) = (f.apply(lo), f.apply(hi));
            Ok(if reversing {
                HyperPoint::Interval { lo: v, hi: u }
            } else {
                HyperPoint::Interval { lo: u, hi: v }
            })
        }
        (Space::Circle, &HyperPoint::Arc { from, to }) => {
            let (u, v) = (f.apply(from), f.apply(to));
            Ok(if reversing {
                HyperPoint::Arc { from: v, to: u }
            } else {
                HyperPoint::Arc { from: u, to: v }
            })
        }
        (Space::Circle, HyperPoint::FullCircle) => Ok(HyperPoint::FullCircle),
        _ => Err(HyperError::Mismatch),
    }
}

/// Pointwise image of a finite set.
pub fn induce_symmetric(f: &Homeo1D, s: &HyperPoint) -> Result<HyperPoint, HyperError> {
    match s {
        HyperPoint::Finite(v) => {
            let mut img: super::Coords = v.iter().map(|&x| f.apply(x)).collect();
            img.sort_by(f64::total_cmp);
            img.dedup();
            Ok(HyperPoint::Finite(img))
        }
        _ => Err(HyperError::Mismatch),
    }
}

/// Image of any state under the map induced on `kind`.
pub fn induce(f: &Homeo1D, kind: StateSpace, p: &HyperPoint) -> Result<HyperPoint, HyperError> {
    match kind {
        StateSpace::Continuum(_) => induce_continuum(f, p),
        StateSpace::Base(_) | StateSpace::Symmetric(..) => induce_symmetric(f, p),
    }
}

/// The fixed points of the induced map on `kind`; for these maps they make up
/// the whole non-wandering set.
pub fn fixed_hyperpoints(f: &Homeo1D, kind: StateSpace) -> Result<Vec<HyperPoint>, HyperError> {
    if f.orientation() != Orientation::Preserving {
        return Err(HyperError::Reversing);
    }
    if kind.space() != f.space() {
        return Err(HyperError::Mismatch);
    }
    let fix = f.fixed_points();
    let mut out = Vec::new();
    match kind {
        StateSpace::Continuum(Space::Interval) => {
            for (i, &a) in fix.iter().enumerate() {
                for &b in &fix[i..] {
                    out.push(HyperPoint::Interval { lo: a, hi: b });
                }
            }
        }
        StateSpace::Continuum(Space::Circle) => {
            for &a in &fix {
                for &b in &fix {
                    // Arcs between distinct fixed points and the fixed singletons.
                    out.push(HyperPoint::Arc { from: a, to: b });
                }
            }
            out.push(HyperPoint::FullCircle);
        }
        StateSpace::Base(_) => out.extend(fix.iter().map(|&a| HyperPoint::singleton(a))),
        StateSpace::Symmetric(_, k) => {
            let n = fix.len();
            for mask in 1u64..(1u64 << n) {
                if (mask.count_ones() as usize) <= k {
                    let pts: super::Coords = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| fix[i]).collect();
                    out.push(HyperPoint::Finite(pts));
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics1d::Orientation;

    fn half_map() -> Homeo1D {
        Homeo1D::checked(
            Space::Interval,
            Orientation::Preserving,
            &[(0.0, 0.0), (0.5, 0.25), (1.0, 1.0)],
        )
        .unwrap()
    }

    fn circle_map() -> Homeo1D {
        Homeo1D::checked(
            Space::Circle,
            Orientation::Preserving,
            &[(0.0, 0.0), (0.5, 0.7), (1.0, 1.0)],
        )
        .unwrap()
    }

    #[test]
    fn interval_and_point_distances() {
        let a = HyperPoint::Interval { lo: 0.0, hi: 0.5 };
        let b = HyperPoint::Interval { lo: 0.25, hi: 0.75 };
        assert_eq!(hausdorff(Space::Interval, &a, &b).unwrap(), 0.25);
        let z = HyperPoint::singleton(0.0);
        let o = HyperPoint::singleton(1.0);
        assert_eq!(hausdorff(Space::Circle, &z, &o).unwrap(), 0.0);
        assert_eq!(hausdorff(Space::Interval, &z, &o).unwrap(), 1.0);
        assert!(hausdorff(Space::Interval, &a, &z).is_err());
    }

    #[test]
    fn arc_cases() {
        let d = |a: ArcRef, b: ArcRef| arc_distance(a, b);
        // opposite sides: endpoints are 0.3 apart but the arcs are far apart as sets
        assert!((d(ArcRef::Arc(0.9, 0.1), ArcRef::Arc(0.4, 0.6)) - 0.4).abs() < 1e-15);
        assert!((d(ArcRef::Full, ArcRef::Arc(0.2, 0.2)) - 0.5).abs() < 1e-15);
        assert!((d(ArcRef::Full, ArcRef::Arc(0.0, 0.6)) - 0.2).abs() < 1e-15);
        assert_eq!(d(ArcRef::Arc(0.1, 0.3), ArcRef::Arc(0.1, 0.3)), 0.0);
        // nested arcs
        assert!((d(ArcRef::Arc(0.1, 0.5), ArcRef::Arc(0.2, 0.3)) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn induced_maps() {
        let f = half_map();
        let c = circle_map();
        assert_eq!(
            induce_continuum(&f, &HyperPoint::Interval { lo: 0.5, hi: 1.0 }).unwrap(),
            HyperPoint::Interval { lo: 0.25, hi: 1.0 }
        );
        assert_eq!(
            induce_continuum(&c, &HyperPoint::FullCircle).unwrap(),
            HyperPoint::FullCircle
        );
        match induce_continuum(&c, &HyperPoint::Arc { from: 0.0, to: 0.25 }).unwrap() {
            HyperPoint::Arc { from, to } => {
                assert_eq!(from, 0.0);
                assert!((to - 0.35).abs() < 1e-15);
            }
            other => panic!("{other}"),
        }
        let s = HyperPoint::finite(Space::Interval, &[0.25, 0.75]).unwrap();
        assert_eq!(
            induce_symmetric(&f, &s).unwrap(),
            HyperPoint::finite(Space::Interval, &[0.125, 0.625]).unwrap()
        );
        assert_eq!(
            induce_symmetric(&f, &HyperPoint::singleton(0.0)).unwrap(),
            HyperPoint::singleton(0.0)
        );
    }

    #[test]
    fn fixed_sets() {
        let f = half_map();
        let c = fixed_hyperpoints(&f, StateSpace::Continuum(Space::Interval)).unwrap();
        assert_eq!(c.len(), 3);
        let s = fixed_hyperpoints(&f, StateSpace::Symmetric(Space::Interval, 2)).unwrap();
        assert_eq!(s.len(), 3);
        assert!(s.contains(&HyperPoint::finite(Space::Interval, &[0.0, 1.0]).unwrap()));
        let cc = fixed_hyperpoints(&circle_map(), StateSpace::Continuum(Space::Circle)).unwrap();
        assert_eq!(cc, vec![HyperPoint::Arc { from: 0.0, to: 0.0 }, HyperPoint::FullCircle]);
    }
}
