use serde::{Deserialize, Serialize};
use std::fmt;

use super::CodingError;
use crate::dynamics1d::Space;
use crate::entropy::{DynSystem, Shape, State};
use crate::hyperspace::HyperPoint;

/// Membership predicate of a letter.
///
/// Coordinate ranges are half-open `(lo, hi]`; on the circle `lo > hi` wraps
/// through 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum LetterRegion {
    /// Base points in `(lo, hi]`.
    Span { lo: f64, hi: f64 },
    /// States whose sorted coordinates (interval ends, arc ends or set
    /// elements) lie coordinatewise in `(lo[i], hi[i]]`.
    Box { lo: Vec<f64>, hi: Vec<f64> },
    /// Open Hausdorff ball.
    Ball {
        #[serde(with = "point_text")]
        center: HyperPoint,
        radius: f64,
    },
}

pub(crate) mod point_text {
    use crate::hyperspace::HyperPoint;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(p: &HyperPoint, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(p)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<HyperPoint, D::Error> {
        String::deserialize(d)?.parse().map_err(D::Error::custom)
    }
}

#[inline]
fn in_range(space: Space, lo: f64, hi: f64, x: f64) -> bool {
    if space == Space::Circle && lo > hi {
        x > lo || x <= hi
    } else {
        lo < x && x <= hi
    }
}

impl LetterRegion {
    pub fn ball(center: HyperPoint, radius: f64) -> Self {
        LetterRegion::Ball { center, radius }
    }

    pub fn contains(&self, space: Space, p: &HyperPoint) -> bool {
        State::from_hyperpoint(p).is_some_and(|st| self.prepare(space).contains(&st))
    }

    pub(crate) fn prepare(&self, space: Space) -> Prepared {
        match self {
            LetterRegion::Span { lo, hi } => Prepared::Box {
                space,
                lo: vec![*lo],
                hi: vec![*hi],
            },
            LetterRegion::Box { lo, hi } => Prepared::Box {
                space,
                lo: lo.clone(),
                hi: hi.clone(),
            },
            LetterRegion::Ball { center, radius } => match State::from_hyperpoint(center) {
                Some(c) => Prepared::Ball {
                    space,
                    center: c,
                    radius: *radius,
                },
                None => Prepared::Empty,
            },
        }
    }

    fn validate(&self) -> Result<(), String> {
        match self {
            LetterRegion::Span { lo, hi } => {
                if !lo.is_finite() || !hi.is_finite() {
                    return Err("span bounds must be finite".into());
                }
            }
            LetterRegion::Box { lo, hi } => {
                if lo.len() != hi.len() || lo.is_empty() || lo.len() > 4 {
                    return Err("box needs 1 to 4 matching lower and upper bounds".into());
                }
                if lo.iter().chain(hi).any(|x| !x.is_finite()) {
                    return Err("box bounds must be finite".into());
                }
            }
            LetterRegion::Ball { center, radius } => {
                if !(*radius >= 0.0) || !radius.is_finite() {
                    return Err("ball radius must be a non-negative number".into());
                }
                if center.cardinality().is_some_and(|k| k > 4) {
                    return Err("ball centers have at most four points".into());
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for LetterRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LetterRegion::Span { lo, hi } => write!(f, "({lo}, {hi}]"),
            LetterRegion::Box { lo, hi } => {
                for (i, (a, b)) in lo.iter().zip(hi).enumerate() {
                    if i > 0 {
                        f.write_str(" x ")?;
                    }
                    write!(f, "({a}, {b}]")?;
                }
                Ok(())
            }
            LetterRegion::Ball { center, radius } => write!(f, "B({center}, {radius})"),
        }
    }
}

/// A region in a form that tests cloud states quickly.
#[derive(Clone, Debug)]
pub(crate) enum Prepared {
    Box { space: Space, lo: Vec<f64>, hi: Vec<f64> },
    Ball { space: Space, center: State, radius: f64 },
    Empty,
}

impl Prepared {
    #[inline]
    pub(crate) fn contains(&self, st: &State) -> bool {
        match self {
            Prepared::Box { space, lo, hi } => {
                if st.shape == Shape::FullCircle || st.len as usize != lo.len() {
                    return false;
                }
                let mut c = st.c;
                let c = &mut c[..st.len as usize];
                if st.shape == Shape::Set {
                    c.sort_by(f64::total_cmp);
                }
                c.iter()
                    .zip(lo.iter().zip(hi))
                    .all(|(&x, (&a, &b))| in_range(*space, a, b, x))
            }
            Prepared::Ball { space, center, radius } => st.distance(*space, center) < *radius,
            Prepared::Empty => false,
        }
    }
}

/// Letter `Y_j`; ids start at 1, the complement letter `Y_∞` has none.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LetterSet {
    pub id: u16,
    pub region: LetterRegion,
}

/// An ordered family of letters `{Y_1, …, Y_L}` for one system.
#[derive(Clone, Debug)]
pub struct Family {
    space: Space,
    letters: Vec<LetterSet>,
    prepared: Vec<Prepared>,
}

impl Family {
    /// Rejects letters that contain a fixed state of `sys`.
    pub fn new(sys: &DynSystem, regions: Vec<LetterRegion>) -> Result<Self, CodingError> {
        if regions.len() >= u16::MAX as usize {
            return Err(CodingError::Config("too many letters".into()));
        }
        let space = sys.space();
        for (j, r) in regions.iter().enumerate() {
            r.validate()
                .map_err(|m| CodingError::Config(format!("letter {}: {m}", j + 1)))?;
            if let Some(p) = sys.fixed_hyperpoints().iter().find(|p| r.contains(space, p)) {
                return Err(CodingError::FixedInLetter {
                    letter: j as u16 + 1,
                    point: p.to_string(),
                });
            }
        }
        let prepared = regions.iter().map(|r| r.prepare(space)).collect();
        let letters = regions
            .into_iter()
            .enumerate()
            .map(|(j, region)| LetterSet {
                id: j as u16 + 1,
                region,
            })
            .collect();
        Ok(Family {
            space,
            letters,
            prepared,
        })
    }

    pub fn empty(sys: &DynSystem) -> Self {
        Family {
            space: sys.space(),
            letters: Vec::new(),
            prepared: Vec::new(),
        }
    }

    pub fn letters(&self) -> &[LetterSet] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub(crate) fn prepared(&self, k: usize) -> &Prepared {
        &self.prepared[k]
    }

    /// The letter containing `st`, `None` for `Y_∞`.
    #[inline]
    pub(crate) fn letter_of(&self, st: &State) -> Result<Option<u16>, (u16, u16)> {
        let mut found = None;
        for (j, p) in self.prepared.iter().enumerate() {
            if p.contains(st) {
                let id = j as u16 + 1;
                if let Some(prev) = found {
                    return Err((prev, id));
                }
                found = Some(id);
            }
        }
        Ok(found)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics1d::{Homeo1D, Orientation};
    use crate::hyperspace::StateSpace;

    fn half(kind: StateSpace) -> DynSystem {
        let f = Homeo1D::checked(
            Space::Interval,
            Orientation::Preserving,
            &[(0.0, 0.0), (0.5, 0.25), (1.0, 1.0)],
        )
        .unwrap();
        DynSystem::new(f, kind).unwrap()
    }

    #[test]
    fn spans_are_half_open() {
        let r = LetterRegion::Span { lo: 0.125, hi: 0.25 };
        assert!(r.contains(Space::Interval, &HyperPoint::singleton(0.25)));
        assert!(!r.contains(Space::Interval, &HyperPoint::singleton(0.125)));
        let wrap = LetterRegion::Span { lo: 0.9, hi: 0.1 };
        assert!(wrap.contains(Space::Circle, &HyperPoint::singleton(0.05)));
        assert!(!wrap.contains(Space::Circle, &HyperPoint::singleton(0.5)));
    }

    #[test]
    fn boxes_read_sorted_coordinates() {
        let r = LetterRegion::Box {
            lo: vec![0.0, 0.5],
            hi: vec![0.2, 0.7],
        };
        let s = State::from_hyperpoint(&HyperPoint::finite(Space::Interval, &[0.6, 0.1]).unwrap()).unwrap();
        assert!(r.prepare(Space::Interval).contains(&s));
        assert!(r.contains(Space::Interval, &HyperPoint::Interval { lo: 0.1, hi: 0.6 }));
        assert!(!r.contains(Space::Interval, &HyperPoint::singleton(0.1)));
    }

    #[test]
    fn fixed_states_cannot_be_letters() {
        let sys = half(StateSpace::Base(Space::Interval));
        let err = Family::new(&sys, vec![LetterRegion::Span { lo: 0.9, hi: 1.0 }]).unwrap_err();
        assert!(matches!(err, CodingError::FixedInLetter { letter: 1, .. }));
        let sys = half(StateSpace::Continuum(Space::Interval));
        let ball = LetterRegion::ball(HyperPoint::Interval { lo: 0.0, hi: 0.95 }, 0.1);
        assert!(Family::new(&sys, vec![ball]).is_err());
        let ball = LetterRegion::ball(HyperPoint::Interval { lo: 0.0, hi: 0.5 }, 0.1);
        assert_eq!(Family::new(&sys, vec![ball]).unwrap().len(), 1);
    }

    #[test]
    fn regions_serialize_with_text_centers() {
        let r = LetterRegion::ball(HyperPoint::Arc { from: 0.0, to: 0.3 }, 0.05);
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(s, r#"{"kind":"ball","center":"A:0:0.3","radius":0.05}"#);
        assert_eq!(serde_json::from_str::<LetterRegion>(&s).unwrap(), r);
    }
}
