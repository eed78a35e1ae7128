use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;
use std::fmt;
use std::str::FromStr;

use super::letters::{Family, LetterRegion};
use super::CodingError;
use crate::entropy::{fit_counts, DynSystem, EntropyEstimate, OrbitCloud, SeparatedCount, State};
use crate::hyperspace::{HyperPoint, SampleCloud};

/// A coding word of length `n`, stored as the positions of its finite letters.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CodingWord {
    n: u32,
    hits: SmallVec<[(u32, u16); 4]>,
}

impl CodingWord {
    pub fn new(n: usize, hits: impl IntoIterator<Item = (usize, u16)>) -> Self {
        let mut hits: SmallVec<[(u32, u16); 4]> = hits.into_iter().map(|(t, j)| (t as u32, j)).collect();
        hits.sort_unstable();
        CodingWord { n: n as u32, hits }
    }

    pub fn len(&self) -> usize {
        self.n as usize
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// `(position, letter)` for every finite letter, in order.
    pub fn hits(&self) -> impl Iterator<Item = (usize, u16)> + '_ {
        self.hits.iter().map(|&(t, j)| (t as usize, j))
    }

    /// Dense form; `None` is `∞`.
    pub fn letters(&self) -> Vec<Option<u16>> {
        let mut v = vec![None; self.n as usize];
        for &(t, j) in &self.hits {
            v[t as usize] = Some(j);
        }
        v
    }

    /// How often letter `j` occurs.
    pub fn visits(&self, j: u16) -> usize {
        self.hits.iter().filter(|h| h.1 == j).count()
    }
}

impl fmt::Display for CodingWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (t, l) in self.letters().into_iter().enumerate() {
            if t > 0 {
                f.write_str(",")?;
            }
            match l {
                Some(j) => write!(f, "{j}")?,
                None => f.write_str("-")?,
            }
        }
        Ok(())
    }
}

impl FromStr for CodingWord {
    type Err = CodingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(CodingWord::new(0, []));
        }
        let mut hits = Vec::new();
        let mut n = 0;
        for (t, tok) in s.split(',').enumerate() {
            n = t + 1;
            match tok.trim() {
                "-" => {}
                x => {
                    let j: u16 = x.parse().map_err(|_| CodingError::Parse(format!("bad letter {x:?}")))?;
                    if j == 0 {
                        return Err(CodingError::Parse("letters are numbered from 1".into()));
                    }
                    hits.push((t, j));
                }
            }
        }
        Ok(CodingWord::new(n, hits))
    }
}

/// Coding of the orbit of `x` for `n` steps.
pub fn code_orbit(sys: &DynSystem, family: &Family, x: &HyperPoint, n: usize) -> Result<CodingWord, CodingError> {
    let mut p = x.clone();
    let mut hits = Vec::new();
    for t in 0..n {
        let st =
            State::from_hyperpoint(&p).ok_or_else(|| CodingError::Config("states have at most four points".into()))?;
        match family.letter_of(&st) {
            Ok(Some(j)) => hits.push((t, j)),
            Ok(None) => {}
            Err((a, b)) => {
                return Err(CodingError::Overlap {
                    a,
                    b,
                    state: p.to_string(),
                })
            }
        }
        if t + 1 < n {
            p = sys.step(&p)?;
        }
    }
    Ok(CodingWord::new(n, hits))
}

fn check_cloud(sys: &DynSystem, cloud: &OrbitCloud, n: usize) -> Result<(), CodingError> {
    if cloud.kind() != sys.kind() {
        return Err(CodingError::Config("cloud and system live in different spaces".into()));
    }
    if n > cloud.horizon() {
        return Err(CodingError::Config(format!(
            "window {n} exceeds the cloud horizon {}",
            cloud.horizon()
        )));
    }
    Ok(())
}

/// Finite-letter hits of cloud point `i` during `[0, n)`.
fn point_hits(cloud: &OrbitCloud, family: &Family, i: usize, n: usize) -> Result<Vec<(u32, u16)>, CodingError> {
    let mut hits = Vec::new();
    if family.is_empty() {
        return Ok(hits);
    }
    for t in 0..n {
        let st = cloud.state(i, t);
        match family.letter_of(&st) {
            Ok(Some(j)) => hits.push((t as u32, j)),
            Ok(None) => {}
            Err((a, b)) => {
                return Err(CodingError::Overlap {
                    a,
                    b,
                    state: st.to_hyperpoint().to_string(),
                })
            }
        }
    }
    Ok(hits)
}

fn sorted_unique(mut v: Vec<CodingWord>) -> Vec<CodingWord> {
    v.par_sort_unstable();
    v.dedup();
    v
}

/// Distinct codings of the cloud points present at window `n`, sorted.
pub fn word_set(
    sys: &DynSystem,
    family: &Family,
    cloud: &OrbitCloud,
    n: usize,
) -> Result<Vec<CodingWord>, CodingError> {
    check_cloud(sys, cloud, n)?;
    let words = (0..cloud.len())
        .into_par_iter()
        .filter(|&i| cloud.points()[i].rank as usize <= n)
        .map(|i| {
            point_hits(cloud, family, i, n).map(|h| CodingWord::new(n, h.into_iter().map(|(t, j)| (t as usize, j))))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(sorted_unique(words))
}

/// `♯A_n(F; Y)` on the cloud.
pub fn word_count(sys: &DynSystem, family: &Family, cloud: &OrbitCloud, n: usize) -> Result<usize, CodingError> {
    Ok(word_set(sys, family, cloud, n)?.len())
}

/// Word counts for every window of `n_list`; one coding pass at the longest
/// window, truncated for the shorter ones. Scale fields are 0.
pub fn word_counts(
    sys: &DynSystem,
    family: &Family,
    cloud: &OrbitCloud,
    n_list: &[usize],
) -> Result<Vec<SeparatedCount>, CodingError> {
    if n_list.is_empty() || n_list[0] == 0 || n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CodingError::Config(
            "n_list must be positive and strictly increasing".into(),
        ));
    }
    let n_max = *n_list.last().unwrap();
    check_cloud(sys, cloud, n_max)?;
    let all: Vec<(u32, Vec<(u32, u16)>)> = (0..cloud.len())
        .into_par_iter()
        .map(|i| point_hits(cloud, family, i, n_max).map(|h| (cloud.points()[i].rank, h)))
        .collect::<Result<_, _>>()?;
    let mut out = Vec::new();
    for &n in n_list {
        let words: Vec<CodingWord> = all
            .par_iter()
            .filter(|(rank, _)| *rank as usize <= n)
            .map(|(_, h)| {
                CodingWord::new(
                    n,
                    h.iter()
                        .take_while(|x| (x.0 as usize) < n)
                        .map(|&(t, j)| (t as usize, j)),
                )
            })
            .collect();
        out.push(SeparatedCount {
            n,
            eps: 0.0,
            count: sorted_unique(words).len(),
            cloud_size: cloud.size_at(n),
            saturated: false,
            witness: None,
        });
    }
    mark_plateaus(&mut out);
    Ok(out)
}

/// Same rule as for separated counts: a flat run of three while the cloud is
/// thin flags the tail.
fn mark_plateaus(counts: &mut [SeparatedCount]) {
    for k in 2..counts.len() {
        let flat = counts[k].count == counts[k - 1].count && counts[k - 1].count == counts[k - 2].count;
        if flat && (counts[k].cloud_size as f64) < 8.0 * counts[k].count as f64 {
            for c in counts[k + 1..].iter_mut() {
                c.saturated = true;
            }
            break;
        }
    }
}

/// `h_pol(f, F; Y)`: log–log slope of the word counts. The fit reports scale 0.
pub fn relative_entropy(
    sys: &DynSystem,
    family: &Family,
    cloud: &OrbitCloud,
    n_list: &[usize],
    r2_threshold: f64,
) -> Result<EntropyEstimate, CodingError> {
    let counts = word_counts(sys, family, cloud, n_list)?;
    Ok(fit_counts(&counts, n_list, &[0.0], r2_threshold)?)
}

/// `M(Z)` on a sample grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaxVisits {
    pub value: usize,
    /// A maximizing orbit visits `Z` at time `±horizon`; the value may be low.
    pub at_boundary: bool,
}

/// Largest number of times in `[-horizon, horizon]` that an orbit through a
/// sample point spends in `z`.
pub fn max_visits(
    sys: &DynSystem,
    z: &LetterRegion,
    cloud: &SampleCloud,
    horizon: usize,
) -> Result<MaxVisits, CodingError> {
    let space = sys.space();
    let region = z.prepare(space);
    let back = DynSystem::new(sys.map().invert(), sys.kind())?;
    let results: Vec<(usize, bool)> = cloud
        .points
        .par_iter()
        .map(|p| -> Result<(usize, bool), CodingError> {
            let inside = |q: &HyperPoint| State::from_hyperpoint(q).is_some_and(|s| region.contains(&s));
            let mut count = inside(p) as usize;
            let mut edge = false;
            for g in [sys, &back] {
                let mut q = p.clone();
                for t in 1..=horizon {
                    q = g.step(&q)?;
                    if inside(&q) {
                        count += 1;
                        edge |= t == horizon;
                    }
                }
            }
            Ok((count, edge))
        })
        .collect::<Result<_, _>>()?;
    let value = results.iter().map(|r| r.0).max().unwrap_or(0);
    let at_boundary = value > 0 && results.iter().any(|&(c, e)| c == value && e);
    if at_boundary {
        log::warn!("max_visits: maximum reached at the horizon {horizon}; raise it");
    }
    Ok(MaxVisits { value, at_boundary })
}

/// Relative entropies for shrinking ball families around `centers`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalEntropy {
    pub radii: Vec<f64>,
    pub estimates: Vec<EntropyEstimate>,
    /// Last slope of the sequence.
    pub value: f64,
    /// Slopes never grew by more than the tolerance as the balls shrank.
    pub monotone: bool,
}

pub fn local_entropy(
    sys: &DynSystem,
    centers: &[HyperPoint],
    cloud: &OrbitCloud,
    radii: &[f64],
    n_list: &[usize],
    tolerance: f64,
) -> Result<LocalEntropy, CodingError> {
    if radii.is_empty() || radii.windows(2).any(|w| w[0] <= w[1]) {
        return Err(CodingError::Config("radii must be non-empty and decreasing".into()));
    }
    let mut estimates = Vec::new();
    for &r in radii {
        let fam = Family::new(sys, centers.iter().map(|c| LetterRegion::ball(c.clone(), r)).collect())?;
        estimates.push(relative_entropy(sys, &fam, cloud, n_list, 0.9)?);
    }
    let monotone = estimates.windows(2).all(|w| w[1].value <= w[0].value + tolerance);
    if !monotone {
        log::warn!("local entropy grew as the neighbourhoods shrank; treat as a sampling artifact");
    }
    Ok(LocalEntropy {
        radii: radii.to_vec(),
        value: estimates.last().map(|e| e.value).unwrap_or(0.0),
        estimates,
        monotone,
    })
}
