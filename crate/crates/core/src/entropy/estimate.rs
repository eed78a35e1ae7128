use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::cloud::OrbitCloud;
use super::packing::Packer;
use super::system::DynSystem;
use super::EntropyError;
use crate::hyperspace::SampleCloud;

/// `S(n, eps; Y)` restricted to a cloud, from a greedy packing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparatedCount {
    pub n: usize,
    pub eps: f64,
    pub count: usize,
    pub cloud_size: usize,
    pub saturated: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Vec<u32>>,
}

/// Least-squares fit of `log count` against `log n` at one scale.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsFit {
    pub eps: f64,
    pub slope: Option<f64>,
    pub r2: Option<f64>,
    /// Window lengths that entered the fit.
    pub n_used: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyEstimate {
    pub fits: Vec<EpsFit>,
    /// Slope at the smallest scale whose fit reaches the r² threshold.
    pub value: f64,
    pub eps_used: f64,
    /// No fit reached the threshold; `value` comes from the smallest fitted scale.
    pub low_r2: bool,
    pub saturated: bool,
    pub n_list: Vec<usize>,
    pub eps_list: Vec<f64>,
    pub counts: Vec<SeparatedCount>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateOptions {
    pub seed: u64,
    pub r2_threshold: f64,
    pub keep_witness: bool,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        EstimateOptions {
            seed: 0,
            r2_threshold: 0.9,
            keep_witness: false,
        }
    }
}

pub const DEFAULT_N_LIST: [usize; 10] = [8, 16, 32, 64, 128, 256, 512, 1024, 2048, 4096];
pub const DEFAULT_EPS_LIST: [f64; 4] = [0.2, 0.1, 0.05, 0.025];

/// Seeded visiting order of the cloud.
pub fn shuffled_order(len: usize, seed: u64) -> Vec<u32> {
    let mut order: Vec<u32> = (0..len as u32).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    order
}

fn check_lists(n_list: &[usize], eps_list: &[f64]) -> Result<(), EntropyError> {
    if n_list.is_empty() || n_list[0] == 0 || n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(EntropyError::Config(
            "n_list must be positive and strictly increasing".into(),
        ));
    }
    if eps_list.is_empty() || eps_list.iter().any(|&e| !(e > 0.0)) {
        return Err(EntropyError::Config("eps_list must contain positive scales".into()));
    }
    Ok(())
}

/// Counts for every `(n, eps)`.
///
/// Scales are processed from coarse to fine and windows from short to long; each
/// packing starts from the larger of the packings at the previous window and the
/// previous scale, both of which are still separated. Counts are therefore
/// non-decreasing in `n` and non-increasing in `eps`.
pub fn separated_counts(
    sys: &DynSystem,
    cloud: &OrbitCloud,
    n_list: &[usize],
    eps_list: &[f64],
    opts: &EstimateOptions,
) -> Result<Vec<SeparatedCount>, EntropyError> {
    check_lists(n_list, eps_list)?;
    if cloud.is_empty() {
        return Err(EntropyError::EmptyCloud);
    }
    if *n_list.last().unwrap() > cloud.horizon() {
        return Err(EntropyError::Config(format!(
            "window {} exceeds the cloud horizon {}",
            n_list.last().unwrap(),
            cloud.horizon()
        )));
    }
    let mut eps_sorted: Vec<f64> = eps_list.to_vec();
    eps_sorted.sort_by(|a, b| b.total_cmp(a));
    for &eps in &eps_sorted {
        if cloud.resolution() > eps / 4.0 {
            log::warn!("cloud resolution {} is coarse for eps = {eps}", cloud.resolution());
        }
    }
    let order = shuffled_order(cloud.len(), opts.seed);
    let packer = Packer::new(sys, cloud);
    let mut prev_eps: Vec<Vec<u32>> = vec![Vec::new(); n_list.len()];
    let mut out = Vec::new();
    for &eps in &eps_sorted {
        let mut row: Vec<Vec<u32>> = Vec::with_capacity(n_list.len());
        for (j, &n) in n_list.iter().enumerate() {
            let from_n = if j > 0 { &row[j - 1] } else { &prev_eps[j] };
            let seed = if from_n.len() >= prev_eps[j].len() {
                from_n
            } else {
                &prev_eps[j]
            };
            let w = packer.pack(n, eps, seed, &order);
            log::debug!("eps={eps} n={n} count={}", w.len());
            row.push(w);
        }
        for (j, &n) in n_list.iter().enumerate() {
            out.push(SeparatedCount {
                n,
                eps,
                count: row[j].len(),
                cloud_size: cloud.size_at(n),
                saturated: false,
                witness: opts.keep_witness.then(|| row[j].clone()),
            });
        }
        prev_eps = row;
    }
    mark_saturation(&mut out);
    Ok(out)
}

/// Flags the tail after three equal consecutive counts when the cloud holds
/// fewer than eight points per witness.
fn mark_saturation(counts: &mut [SeparatedCount]) {
    let mut i = 0;
    while i < counts.len() {
        let eps = counts[i].eps;
        let mut j = i;
        while j < counts.len() && counts[j].eps == eps {
            j += 1;
        }
        let row = &mut counts[i..j];
        for k in 2..row.len() {
            let flat = row[k].count == row[k - 1].count && row[k - 1].count == row[k - 2].count;
            if flat && (row[k].cloud_size as f64) < 8.0 * row[k].count as f64 {
                for r in row[k + 1..].iter_mut() {
                    r.saturated = true;
                }
                break;
            }
        }
        i = j;
    }
}

/// Ordinary least squares of `y` on `x`: slope and r² (1 for an exact fit).
pub fn fit_line(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, r2)
}

/// Log–log slopes per scale and the reported value.
pub fn fit_counts(
    counts: &[SeparatedCount],
    n_list: &[usize],
    eps_list: &[f64],
    r2_threshold: f64,
) -> Result<EntropyEstimate, EntropyError> {
    let mut fits = Vec::new();
    let mut eps_sorted: Vec<f64> = eps_list.to_vec();
    eps_sorted.sort_by(|a, b| b.total_cmp(a));
    for &eps in &eps_sorted {
        let row: Vec<&SeparatedCount> = counts.iter().filter(|c| c.eps == eps && !c.saturated).collect();
        let (slope, r2) = if row.len() >= 3 {
            let x: Vec<f64> = row.iter().map(|c| (c.n as f64).ln()).collect();
            let y: Vec<f64> = row.iter().map(|c| (c.count as f64).ln()).collect();
            let (s, r) = fit_line(&x, &y);
            (Some(s.max(0.0)), Some(r))
        } else {
            (None, None)
        };
        fits.push(EpsFit {
            eps,
            slope,
            r2,
            n_used: row.iter().map(|c| c.n).collect(),
        });
    }
    let fitted: Vec<&EpsFit> = fits.iter().filter(|f| f.slope.is_some()).collect();
    if fitted.is_empty() {
        return Err(EntropyError::TooFewPoints);
    }
    let good = fitted.iter().rev().find(|f| f.r2.unwrap() >= r2_threshold);
    let (chosen, low_r2) = match good {
        Some(f) => (*f, false),
        None => (*fitted.last().unwrap(), true),
    };
    Ok(EntropyEstimate {
        value: chosen.slope.unwrap(),
        eps_used: chosen.eps,
        low_r2,
        saturated: counts.iter().any(|c| c.saturated),
        fits: fits.clone(),
        n_list: n_list.to_vec(),
        eps_list: eps_sorted,
        counts: counts.to_vec(),
    })
}

/// Polynomial entropy estimate: log–log slope of separated counts, at the
/// smallest scale that fits well.
pub fn estimate_hpol(
    sys: &DynSystem,
    cloud: &OrbitCloud,
    n_list: &[usize],
    eps_list: &[f64],
    opts: &EstimateOptions,
) -> Result<EntropyEstimate, EntropyError> {
    let counts = separated_counts(sys, cloud, n_list, eps_list, opts)?;
    fit_counts(&counts, n_list, eps_list, opts.r2_threshold)
}

/// One greedy count on a sample grid.
pub fn separated_count(
    cloud: &SampleCloud,
    sys: &DynSystem,
    n: usize,
    eps: f64,
    seed: u64,
) -> Result<SeparatedCount, EntropyError> {
    if cloud.is_empty() {
        return Err(EntropyError::EmptyCloud);
    }
    let oc = OrbitCloud::from_samples(sys, cloud, n)?;
    let opts = EstimateOptions {
        seed,
        keep_witness: true,
        ..EstimateOptions::default()
    };
    let mut v = separated_counts(sys, &oc, &[n], &[eps], &opts)?;
    Ok(v.remove(0))
}
