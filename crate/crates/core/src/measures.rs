//! Concordance indexes against a continuous gold standard.
//!
//! Subjects with `z > c` are cases at cut `c`, the rest controls. `A(c)` is
//! the Mann-Whitney concordance of case scores over control scores, `0.5`
//! when either group is empty.

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::density::{integrate_step, AtomPairing, CutWeight, StepFunction, WeightKind};
use crate::error::{Error, Result};
use crate::rank_tree::{dense_ranks, RankCounter};
use crate::smooth::PairWeights;
use crate::util::{mean, sample_sd};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Method {
    Hard(WeightKind),
    Smooth(WeightKind),
    Theta,
    ClassicalAuc { cut: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AucEstimate {
    pub value: f64,
    pub method: Method,
    /// Sigmoid bandwidth for smoothed estimates.
    pub h: Option<f64>,
    /// Kernel bandwidth of the cut weight, when it has one.
    pub weight_bandwidth: Option<f64>,
    pub boot_var: Option<f64>,
}

impl AucEstimate {
    fn new(value: f64, method: Method) -> Self {
        Self { value, method, h: None, weight_bandwidth: None, boot_var: None }
    }
}

/// `A(t)` over all cuts, plus group sizes per interval.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub cut: StepFunction,
    pub cases: Vec<usize>,
    pub controls: Vec<usize>,
}

fn check_pair(y: &[f64], z: &[f64]) -> Result<()> {
    if y.len() != z.len() {
        return Err(Error::LengthMismatch { left: y.len(), right: z.len() });
    }
    if y.len() < 2 {
        return Err(Error::TooFewRows { needed: 2, found: y.len() });
    }
    Ok(())
}

/// `A(c)` by direct pair counting.
pub fn auc_at_cut(y: &[f64], z: &[f64], c: f64) -> Result<f64> {
    check_pair(y, z)?;
    let (mut n1, mut n0) = (0u64, 0u64);
    let mut twice = 0u64;
    for i in 0..y.len() {
        if z[i] <= c {
            n0 += 1;
            continue;
        }
        n1 += 1;
        for j in 0..y.len() {
            if z[j] <= c {
                twice += if y[i] > y[j] {
                    2
                } else if y[i] == y[j] {
                    1
                } else {
                    0
                };
            }
        }
    }
    if n1 == 0 || n0 == 0 {
        return Ok(0.5);
    }
    Ok(twice as f64 / (2.0 * n1 as f64 * n0 as f64))
}

/// `A(t)` for every cut at once.
///
/// Sweeps `c` upward through the distinct gold values, moving subjects from
/// the case group to the control group and updating the (doubled) concordant
/// pair count with rank queries against both groups. `O(n log n)` overall.
pub fn sweep_cuts(y: &[f64], z: &[f64]) -> Result<SweepResult> {
    check_pair(y, z)?;
    let n = y.len();
    let (rank, distinct) = dense_ranks(y);
    let mut counts = vec![0i64; distinct];
    for &r in &rank {
        counts[r] += 1;
    }
    let mut cases = RankCounter::from_counts(&counts);
    let mut controls = RankCounter::new(distinct);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| z[a].total_cmp(&z[b]));

    let mut breaks = Vec::new();
    let mut values = vec![0.5];
    let mut n_cases = vec![n];
    let mut n_controls = vec![0];
    // twice the sum of psi over (case, control) pairs
    let mut twice: i64 = 0;
    let mut k = 0;
    while k < n {
        let level = z[order[k]];
        while k < n && z[order[k]] == level {
            let r = rank[order[k]];
            cases.add(r, -1);
            twice -= 2 * controls.count_below(r) + controls.count_equal(r);
            twice += 2 * cases.count_above(r) + cases.count_equal(r);
            controls.add(r, 1);
            k += 1;
        }
        breaks.push(level);
        let (n1, n0) = (cases.len(), controls.len());
        values.push(if n1 == 0 || n0 == 0 { 0.5 } else { twice as f64 / (2.0 * n1 as f64 * n0 as f64) });
        n_cases.push(n1 as usize);
        n_controls.push(n0 as usize);
    }
    Ok(SweepResult { cut: StepFunction::new(breaks, values)?, cases: n_cases, controls: n_controls })
}

/// Hard integrated index `int A(t) w(t) dt`.
pub fn auc_integrated(y: &[f64], z: &[f64], w: &CutWeight) -> Result<AucEstimate> {
    let sweep = sweep_cuts(y, z)?;
    let mut est = AucEstimate::new(integrate_step(&sweep.cut, w), Method::Hard(w.kind()));
    est.weight_bandwidth = w.bandwidth();
    Ok(est)
}

/// Integrated index against the empirical distribution of `z`, reading
/// `A` at the left limit of each observed gold value.
pub fn auc_integrated_empirical(y: &[f64], z: &[f64]) -> Result<AucEstimate> {
    auc_integrated_empirical_with(y, z, AtomPairing::LeftLimit)
}

/// As [`auc_integrated_empirical`] with an explicit atom convention.
pub fn auc_integrated_empirical_with(y: &[f64], z: &[f64], pairing: AtomPairing) -> Result<AucEstimate> {
    check_pair(y, z)?;
    auc_integrated(y, z, &CutWeight::empirical(z, pairing)?)
}

/// Sigmoid-smoothed integrated index with bandwidth `h`.
pub fn auc_smoothed(y: &[f64], z: &[f64], w: &CutWeight, h: f64) -> Result<AucEstimate> {
    check_pair(y, z)?;
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidArgument(format!("smoothing bandwidth {h} must be > 0")));
    }
    let pairs = PairWeights::new(z, w)?;
    let mut est = AucEstimate::new(pairs.smooth_value(y, h), Method::Smooth(w.kind()));
    est.h = Some(h);
    est.weight_bandwidth = w.bandwidth();
    Ok(est)
}

/// Default sigmoid bandwidth `sd(y) * n^(-1/3)`.
pub fn default_smoothing_bandwidth(y: &[f64]) -> f64 {
    let sd = sample_sd(y);
    let scale = if sd > 0.0 && sd.is_finite() { sd } else { 1.0 };
    scale * (y.len() as f64).powf(-1.0 / 3.0)
}

/// Index of the combined score `l^T x`, hard or smoothed.
pub fn auc_combined(d: &Dataset, l: &[f64], w: &CutWeight, smooth: bool, h: Option<f64>) -> Result<AucEstimate> {
    if l.len() != d.p() {
        return Err(Error::LengthMismatch { left: l.len(), right: d.p() });
    }
    if l.iter().all(|&c| c == 0.0) {
        return Err(Error::InvalidArgument("coefficient vector is zero".into()));
    }
    let y = d.project(l)?;
    if smooth {
        let h = h.unwrap_or_else(|| default_smoothing_bandwidth(&y));
        auc_smoothed(&y, d.z(), w, h)
    } else {
        auc_integrated(&y, d.z(), w)
    }
}

/// Obuchowski's concordance over ordered pairs; ties in either variable count one half.
pub fn theta_obuchowski(y: &[f64], z: &[f64]) -> Result<AucEstimate> {
    check_pair(y, z)?;
    let n = y.len();
    let mut twice = 0u64;
    for i in 0..n {
        for j in (i + 1)..n {
            twice += if y[i] == y[j] || z[i] == z[j] {
                1
            } else if (y[i] > y[j]) == (z[i] > z[j]) {
                2
            } else {
                0
            };
        }
    }
    // each unordered pair stands for two ordered pairs with the same kernel value
    let value = twice as f64 / (n as f64 * (n - 1) as f64);
    Ok(AucEstimate::new(value, Method::Theta))
}

/// Mann-Whitney AUC for a binary outcome (`true` = case).
pub fn classical_auc(y: &[f64], labels: &[bool]) -> Result<f64> {
    if y.len() != labels.len() {
        return Err(Error::LengthMismatch { left: y.len(), right: labels.len() });
    }
    let n1 = labels.iter().filter(|&&b| b).count();
    let n0 = labels.len() - n1;
    if n1 == 0 || n0 == 0 {
        return Err(Error::SingleClass);
    }
    let (rank, distinct) = dense_ranks(y);
    let mut controls = RankCounter::new(distinct);
    for (r, _) in rank.iter().zip(labels).filter(|(_, &b)| !b) {
        controls.add(*r, 1);
    }
    let twice: i64 = rank
        .iter()
        .zip(labels)
        .filter(|(_, &b)| b)
        .map(|(&r, _)| 2 * controls.count_below(r) + controls.count_equal(r))
        .sum();
    Ok(twice as f64 / (2.0 * n1 as f64 * n0 as f64))
}

/// Pearson correlation; `0` when either variable is constant.
pub fn pearson(y: &[f64], z: &[f64]) -> Result<f64> {
    check_pair(y, z)?;
    let (my, mz) = (mean(y), mean(z));
    let (mut syy, mut szz, mut syz) = (0.0, 0.0, 0.0);
    for (a, b) in y.iter().zip(z) {
        let (dy, dz) = (a - my, b - mz);
        syy += dy * dy;
        szz += dz * dz;
        syz += dy * dz;
    }
    if syy == 0.0 || szz == 0.0 {
        return Ok(0.0);
    }
    Ok(syz / (syy.sqrt() * szz.sqrt()))
}
