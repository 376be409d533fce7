use serde::{Deserialize, Serialize};

use super::{CombinationMethod, CombinationResult};
use crate::data::Dataset;
use crate::density::CutWeight;
use crate::error::{Error, Result};
use crate::measures::{auc_integrated, auc_smoothed};
use crate::smooth::SmoothObjective;
use crate::util::sample_sd;

/// How gradient components are compared against `tau * max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ThresholdRule {
    /// `d_j >= tau * max_k d_k` on signed components.
    #[default]
    Signed,
    /// `|d_j| >= tau * max_k |d_k|`.
    Absolute,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TgdmConfig {
    pub tau: f64,
    /// Sigmoid bandwidth; `None` uses `sd(anchor column) * n^(-1/3)`.
    pub h: Option<f64>,
    pub max_iter: usize,
    /// Stop once one iteration improves the objective by less than this.
    pub tol: f64,
    /// Step-size grid `{0} U logspace(min, max, grid_size)`, refined by golden section.
    pub step_min: f64,
    pub step_max: f64,
    pub grid_size: usize,
    pub golden_iters: usize,
    pub rule: ThresholdRule,
}

impl Default for TgdmConfig {
    fn default() -> Self {
        Self {
            tau: 1.0,
            h: None,
            max_iter: 500,
            tol: 1e-6,
            step_min: 1e-4,
            step_max: 10.0,
            grid_size: 40,
            golden_iters: 20,
            rule: ThresholdRule::Signed,
        }
    }
}

impl TgdmConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(m.to_string()));
        if !(0.0..=1.0).contains(&self.tau) {
            return bad("tau must lie in [0, 1]");
        }
        if let Some(h) = self.h {
            if !(h > 0.0) || !h.is_finite() {
                return bad("h must be > 0");
            }
        }
        if !(self.tol > 0.0) {
            return bad("tol must be > 0");
        }
        if !(self.step_min > 0.0 && self.step_max > self.step_min) || self.grid_size < 2 {
            return bad("step grid needs 0 < step_min < step_max and at least two points");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Anchor {
    pub index: usize,
    /// `+1` where the variable's hard index exceeds 0.5, else `-1`.
    pub signs: Vec<f64>,
    /// Smoothed index of each signed single variable.
    pub scores: Vec<f64>,
}

/// Picks the variable whose signed single-variable smoothed index is largest.
pub fn select_anchor(d: &Dataset, w: &CutWeight, h: f64) -> Result<Anchor> {
    let mut signs = Vec::with_capacity(d.p());
    let mut scores = Vec::with_capacity(d.p());
    for j in 0..d.p() {
        let col = d.column(j);
        let hard = auc_integrated(col, d.z(), w)?.value;
        let s = if hard > 0.5 { 1.0 } else { -1.0 };
        let signed: Vec<f64> = col.iter().map(|v| s * v).collect();
        scores.push(auc_smoothed(&signed, d.z(), w, h)?.value);
        signs.push(s);
    }
    let mut index = 0;
    for j in 1..scores.len() {
        if scores[j] > scores[index] {
            index = j;
        }
    }
    Ok(Anchor { index, signs, scores })
}

/// Gradient of the smoothed index of `l^T x` with respect to `l`.
pub fn tgdm_gradient(d: &Dataset, l: &[f64], w: &CutWeight, h: f64) -> Result<Vec<f64>> {
    if l.len() != d.p() {
        return Err(Error::LengthMismatch { left: l.len(), right: d.p() });
    }
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!("smoothing bandwidth {h} must be > 0")));
    }
    Ok(SmoothObjective::new(d, w)?.gradient(l, h))
}

/// Threshold gradient ascent on the smoothed index with a frozen anchor.
///
/// Starts at `s_anchor * e_anchor`. Each iteration takes the gradient with the
/// anchor component masked, keeps the components passing the threshold rule,
/// and line-searches along that direction (normalized) over a log grid of
/// steps followed by golden-section refinement around the best grid point.
/// The zero step is always a candidate, so the objective never decreases.
pub fn tgdm_maximize(d: &Dataset, w: &CutWeight, cfg: &TgdmConfig) -> Result<CombinationResult> {
    cfg.validate()?;
    let p = d.p();
    let rate = (d.n() as f64).powf(-1.0 / 3.0);
    let positive_or_one = |s: f64| if s > 0.0 && s.is_finite() { s } else { 1.0 };
    // without a fixed h, candidates are compared at the pooled column scale
    // and the run itself uses the anchor's own scale
    let anchor_h = cfg.h.unwrap_or_else(|| {
        let mean_sd = d.columns().iter().map(|c| sample_sd(c)).sum::<f64>() / p as f64;
        positive_or_one(mean_sd) * rate
    });
    let anchor = select_anchor(d, w, anchor_h)?;
    let a = anchor.index;
    let h = cfg.h.unwrap_or_else(|| positive_or_one(sample_sd(d.column(a))) * rate);
    let objective = SmoothObjective::new(d, w)?;

    let mut l = vec![0.0; p];
    l[a] = anchor.signs[a];
    let mut f = objective.value(&l, h);
    let mut trace = vec![f];
    let method = CombinationMethod::Tgdm { tau: cfg.tau, h };
    if p == 1 {
        return Ok(CombinationResult { l, anchor: Some(a), trace, iterations: 0, converged: true, method });
    }

    let grid: Vec<f64> = std::iter::once(0.0)
        .chain((0..cfg.grid_size).map(|i| {
            let t = i as f64 / (cfg.grid_size - 1) as f64;
            (cfg.step_min.ln() + t * (cfg.step_max.ln() - cfg.step_min.ln())).exp()
        }))
        .collect();

    let mut iterations = 0;
    let mut converged = false;
    let mut trial = vec![0.0; p];
    while iterations < cfg.max_iter {
        let mut g = objective.gradient(&l, h);
        g[a] = 0.0;
        let dir = threshold_direction(&g, a, cfg.tau, cfg.rule);
        let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            converged = true;
            break;
        }
        let dir: Vec<f64> = dir.iter().map(|v| v / norm).collect();

        let mut eval = |step: f64| {
            for j in 0..p {
                trial[j] = l[j] + step * dir[j];
            }
            objective.value(&trial, h)
        };
        let values: Vec<f64> = grid.iter().map(|&s| if s == 0.0 { f } else { eval(s) }).collect();
        let mut best = 0;
        for k in 1..values.len() {
            if values[k] > values[best] {
                best = k;
            }
        }
        let lo = grid[best.saturating_sub(1)];
        let hi = grid[(best + 1).min(grid.len() - 1)];
        let (golden_step, golden_value) = golden_section(&mut eval, lo, hi, cfg.golden_iters);
        let (step, value) =
            if golden_value > values[best] { (golden_step, golden_value) } else { (grid[best], values[best]) };

        iterations += 1;
        if step > 0.0 {
            for j in 0..p {
                l[j] += step * dir[j];
            }
            l[a] = anchor.signs[a];
        }
        let gain = value - f;
        f = value.max(f);
        trace.push(f);
        if gain < cfg.tol {
            converged = true;
            break;
        }
    }
    Ok(CombinationResult { l, anchor: Some(a), trace, iterations, converged, method })
}

/// Masked gradient keeping only the components that pass the threshold.
fn threshold_direction(g: &[f64], anchor: usize, tau: f64, rule: ThresholdRule) -> Vec<f64> {
    let key = |v: f64| match rule {
        ThresholdRule::Signed => v,
        ThresholdRule::Absolute => v.abs(),
    };
    let max =
        g.iter().enumerate().filter(|(j, _)| *j != anchor).map(|(_, &v)| key(v)).fold(f64::NEG_INFINITY, f64::max);
    g.iter().enumerate().map(|(j, &v)| if j != anchor && key(v) >= tau * max { v } else { 0.0 }).collect()
}

/// Maximizes `f` on `[lo, hi]`; returns the best point seen and its value.
fn golden_section(f: &mut impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64, iters: usize) -> (f64, f64) {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iters {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}
