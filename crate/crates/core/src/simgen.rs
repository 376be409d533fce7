//! Synthetic designs and the replicate harness that summarizes them.
//!
//! Every replicate is generated from its own random stream keyed by
//! `(seed, replicate)`, so cells and replicates can be run in any order (or in
//! parallel) and still produce identical tables.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combination::{ols_combination, tgdm_maximize, TgdmConfig};
use crate::data::Dataset;
use crate::density::{fit_weight, BandwidthRule, WeightSpec};
use crate::error::{Error, Result};
use crate::inference::{bootstrap_variance, wald_p_value, FnStatistic};
use crate::measures::{auc_integrated, pearson, theta_obuchowski};
use crate::util::{mean, quantile, sample_sd, splitmix64, stream_rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    Normal,
    StudentT2,
    Cauchy,
}

impl Family {
    pub fn label(self) -> &'static str {
        match self {
            Family::Normal => "normal",
            Family::StudentT2 => "t2",
            Family::Cauchy => "cauchy",
        }
    }

    pub fn sample<R: Rng + ?Sized>(self, rng: &mut R) -> f64 {
        match self {
            Family::Normal => rng.sample(StandardNormal),
            // normal / sqrt(chi2_2 / 2), with chi2_2 / 2 = -ln U
            Family::StudentT2 => {
                let n: f64 = rng.sample(StandardNormal);
                let u: f64 = 1.0 - rng.random::<f64>();
                n / (-u.ln()).sqrt()
            }
            Family::Cauchy => {
                let u: f64 = rng.random();
                (std::f64::consts::PI * (u - 0.5)).tan()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Design {
    /// One score `y` and gold `z`, bivariate normal.
    BivariateNormal { mu1: f64, mu2: f64, sigma1: f64, sigma2: f64, rho: f64 },
    /// `y = z^2 + e` with symmetric `z`: no monotone association.
    NullQuadratic { z_family: Family },
    /// `z = coef^T x + e`, `x` standard normal with identity covariance.
    LinearModel { coef: Vec<f64>, error: Family },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimSpec {
    pub design: Design,
    pub n: usize,
    pub replicates: usize,
    pub seed: u64,
}

impl SimSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(m.to_string()));
        if self.n < 2 {
            return bad("n must be at least 2");
        }
        match &self.design {
            Design::BivariateNormal { sigma1, sigma2, rho, .. } => {
                if !(*sigma1 > 0.0 && *sigma2 > 0.0) {
                    return bad("standard deviations must be positive");
                }
                if !(-1.0..=1.0).contains(rho) {
                    return bad("rho must lie in [-1, 1]");
                }
            }
            Design::LinearModel { coef, .. } if coef.len() < 2 => return bad("linear model needs p >= 2"),
            _ => {}
        }
        Ok(())
    }
}

/// Dataset for replicate `replicate` of `spec`; identical for identical inputs.
pub fn generate(spec: &SimSpec, replicate: usize) -> Result<Dataset> {
    spec.validate()?;
    let mut rng = stream_rng(spec.seed, replicate as u64);
    let n = spec.n;
    match &spec.design {
        Design::BivariateNormal { mu1, mu2, sigma1, sigma2, rho } => {
            let resid = (1.0 - rho * rho).max(0.0).sqrt();
            let mut y = Vec::with_capacity(n);
            let mut z = Vec::with_capacity(n);
            for _ in 0..n {
                let e1: f64 = rng.sample(StandardNormal);
                let e2: f64 = rng.sample(StandardNormal);
                z.push(mu2 + sigma2 * e1);
                y.push(mu1 + sigma1 * (rho * e1 + resid * e2));
            }
            Dataset::new(vec![y], z, vec!["y".into()], "z")
        }
        Design::NullQuadratic { z_family } => {
            let mut y = Vec::with_capacity(n);
            let mut z = Vec::with_capacity(n);
            for _ in 0..n {
                let zi = z_family.sample(&mut rng);
                let e: f64 = rng.sample(StandardNormal);
                z.push(zi);
                y.push(zi * zi + e);
            }
            Dataset::new(vec![y], z, vec!["y".into()], "z")
        }
        Design::LinearModel { coef, error } => {
            let p = coef.len();
            let mut cols = vec![Vec::with_capacity(n); p];
            let mut z = Vec::with_capacity(n);
            for _ in 0..n {
                let mut s = 0.0;
                for (col, c) in cols.iter_mut().zip(coef) {
                    let x: f64 = rng.sample(StandardNormal);
                    s += c * x;
                    col.push(x);
                }
                z.push(s + error.sample(&mut rng));
            }
            Dataset::from_columns(cols, z)
        }
    }
}

/// Where the score being evaluated comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ScoreSource {
    Column(usize),
    /// Least-squares combination of all variables.
    Ols,
    /// TGDM combination maximizing the smoothed kernel-weighted index.
    Tgdm(TgdmConfig),
}

impl ScoreSource {
    pub fn label(&self, names: &[String]) -> String {
        match self {
            ScoreSource::Column(j) => names.get(*j).cloned().unwrap_or_else(|| format!("x{}", j + 1)),
            ScoreSource::Ols => "CC".into(),
            ScoreSource::Tgdm(_) => "TGDM".into(),
        }
    }
}

/// Index computed on a score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Measure {
    Pearson,
    /// Hard index with the uniform weight.
    AucUniform,
    AucNormal,
    AucKernel,
    Theta,
}

impl Measure {
    pub fn label(self) -> &'static str {
        match self {
            Measure::Pearson => "rho",
            Measure::AucUniform => "A_I1",
            Measure::AucNormal => "A_I2",
            Measure::AucKernel => "A_I3",
            Measure::Theta => "theta",
        }
    }

    /// Value under no association.
    pub fn null_value(self) -> f64 {
        match self {
            Measure::Pearson => 0.0,
            _ => 0.5,
        }
    }

    /// Evaluates the measure; cut weights are fitted to `z` on every call.
    pub fn evaluate(self, y: &[f64], z: &[f64]) -> Result<f64> {
        let hard = |spec: WeightSpec| -> Result<f64> { Ok(auc_integrated(y, z, &fit_weight(&spec, z)?)?.value) };
        match self {
            Measure::Pearson => pearson(y, z),
            Measure::AucUniform => hard(WeightSpec::Uniform),
            Measure::AucNormal => hard(WeightSpec::Normal),
            Measure::AucKernel => hard(WeightSpec::Kernel(BandwidthRule::Silverman)),
            Measure::Theta => Ok(theta_obuchowski(y, z)?.value),
        }
    }

    pub const ALL: [Measure; 5] =
        [Measure::Pearson, Measure::AucUniform, Measure::AucNormal, Measure::AucKernel, Measure::Theta];
}

/// One cell of a simulation table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub label: String,
    pub spec: SimSpec,
    pub sources: Vec<ScoreSource>,
    pub measures: Vec<Measure>,
    /// Bootstrap replicates per dataset; `0` disables variance estimation.
    pub boot: usize,
}

/// Summary of one (cell, source, measure) across replicates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub cell: String,
    pub source: String,
    pub measure: String,
    pub replicates: usize,
    pub failures: usize,
    pub mean: f64,
    pub emp_sd: f64,
    /// Mean of per-replicate bootstrap standard deviations.
    pub boot_sd: Option<f64>,
    /// Quantiles of `|value - null|`.
    pub q25: f64,
    pub q50: f64,
    pub q75: f64,
    /// Share of replicates whose Wald test rejects at 0.05.
    pub reject_rate: Option<f64>,
    pub mean_p: Option<f64>,
}

/// Nominal level for rejection rates.
pub const ALPHA: f64 = 0.05;

#[derive(Debug, Clone, Copy)]
struct Draw {
    value: f64,
    boot_var: Option<f64>,
}

fn replicate_draws(cell: &Cell, replicate: usize) -> Result<Vec<Vec<Option<Draw>>>> {
    let d = generate(&cell.spec, replicate)?;
    let z = d.z();
    let mut out = Vec::with_capacity(cell.sources.len());
    for (si, source) in cell.sources.iter().enumerate() {
        let l = match source {
            ScoreSource::Column(j) => {
                let mut l = vec![0.0; d.p()];
                l[*j] = 1.0;
                Some(l)
            }
            ScoreSource::Ols => ols_combination(&d).ok().map(|r| r.l),
            ScoreSource::Tgdm(cfg) => {
                let w = fit_weight(&WeightSpec::Kernel(BandwidthRule::Silverman), z)?;
                tgdm_maximize(&d, &w, cfg).ok().map(|r| r.l)
            }
        };
        let Some(l) = l else {
            out.push(vec![None; cell.measures.len()]);
            continue;
        };
        let y = d.project(&l)?;
        let mut row = Vec::with_capacity(cell.measures.len());
        for (mi, &m) in cell.measures.iter().enumerate() {
            let Ok(value) = m.evaluate(&y, z) else {
                row.push(None);
                continue;
            };
            let boot_var = if cell.boot >= 2 {
                let stat = FnStatistic::new(m.label(), |b: &Dataset| m.evaluate(&b.project(&l)?, b.z()));
                let seed = splitmix64(
                    cell.spec.seed ^ splitmix64(((replicate as u64) << 16) | ((si as u64) << 8) | mi as u64),
                );
                bootstrap_variance(&d, &stat, cell.boot, seed).ok().map(|r| r.variance)
            } else {
                None
            };
            row.push(Some(Draw { value, boot_var }));
        }
        out.push(row);
    }
    Ok(out)
}

fn summarize(cell: &Cell, source: &str, m: Measure, draws: &[Option<Draw>]) -> TableRow {
    let ok: Vec<Draw> = draws.iter().flatten().copied().collect();
    let values: Vec<f64> = ok.iter().map(|d| d.value).collect();
    let dev: Vec<f64> = values.iter().map(|v| (v - m.null_value()).abs()).collect();
    let vars: Vec<f64> = ok.iter().filter_map(|d| d.boot_var).collect();
    let boot_sd = (!vars.is_empty()).then(|| mean(&vars.iter().map(|v| v.sqrt()).collect::<Vec<_>>()));
    let p_values: Vec<f64> =
        ok.iter().filter_map(|d| d.boot_var.map(|v| wald_p_value(d.value, v, m.null_value()))).collect();
    let (reject_rate, mean_p) = if p_values.is_empty() {
        (None, None)
    } else {
        let rej = p_values.iter().filter(|&&p| p < ALPHA).count() as f64 / p_values.len() as f64;
        (Some(rej), Some(mean(&p_values)))
    };
    TableRow {
        cell: cell.label.clone(),
        source: source.to_string(),
        measure: m.label().to_string(),
        replicates: ok.len(),
        failures: draws.len() - ok.len(),
        mean: if values.is_empty() { f64::NAN } else { mean(&values) },
        emp_sd: sample_sd(&values),
        boot_sd,
        q25: quantile(&dev, 0.25),
        q50: quantile(&dev, 0.50),
        q75: quantile(&dev, 0.75),
        reject_rate,
        mean_p,
    }
}

/// Runs every cell and summarizes each (source, measure) pair.
///
/// Replicates are evaluated in parallel and merged by index.
pub fn run_table(cells: &[Cell]) -> Result<Vec<TableRow>> {
    if cells.is_empty() {
        return Err(Error::InvalidArgument("simulation grid is empty".into()));
    }
    let mut rows = Vec::new();
    for cell in cells {
        cell.spec.validate()?;
        let per_rep: Vec<Result<Vec<Vec<Option<Draw>>>>> =
            (0..cell.spec.replicates).into_par_iter().map(|r| replicate_draws(cell, r)).collect();
        let per_rep: Vec<Vec<Vec<Option<Draw>>>> = per_rep.into_iter().collect::<Result<_>>()?;
        let names: Vec<String> = generate(&cell.spec, 0)?.names().to_vec();
        for (si, source) in cell.sources.iter().enumerate() {
            for (mi, &m) in cell.measures.iter().enumerate() {
                let draws: Vec<Option<Draw>> = per_rep.iter().map(|r| r[si][mi]).collect();
                rows.push(summarize(cell, &source.label(&names), m, &draws));
            }
        }
    }
    Ok(rows)
}

/// Seed for cell `index` of a grid started from `seed`.
pub fn cell_seed(seed: u64, index: usize) -> u64 {
    splitmix64(seed ^ splitmix64(index as u64 + 1))
}

/// Bivariate-normal grid: every `(sigma1, sigma2)` pair times every `rho`.
pub fn bivariate_cells(n: usize, replicates: usize, boot: usize, seed: u64) -> Vec<Cell> {
    let sigmas = [(1.0, 1.0), (1.0, 2.0), (2.0, 1.0), (2.0, 2.0)];
    let rhos = [0.0, 0.25, 0.5, 0.75, 1.0];
    let mut cells = Vec::new();
    for (s1, s2) in sigmas {
        for rho in rhos {
            let idx = cells.len();
            cells.push(Cell {
                label: format!("n={n} sigma=({s1:.1},{s2:.1}) rho={rho:.2}"),
                spec: SimSpec {
                    design: Design::BivariateNormal { mu1: 1.0, mu2: 1.0, sigma1: s1, sigma2: s2, rho },
                    n,
                    replicates,
                    seed: cell_seed(seed, idx),
                },
                sources: vec![ScoreSource::Column(0)],
                measures: Measure::ALL.to_vec(),
                boot,
            });
        }
    }
    cells
}

/// Null designs `y = z^2 + e` for each gold-standard family.
pub fn null_cells(n: usize, replicates: usize, boot: usize, seed: u64) -> Vec<Cell> {
    [Family::Normal, Family::StudentT2, Family::Cauchy]
        .into_iter()
        .enumerate()
        .map(|(idx, f)| Cell {
            label: format!("n={n} z~{}", f.label()),
            spec: SimSpec { design: Design::NullQuadratic { z_family: f }, n, replicates, seed: cell_seed(seed, idx) },
            sources: vec![ScoreSource::Column(0)],
            measures: Measure::ALL.to_vec(),
            boot,
        })
        .collect()
}

/// Linear-model designs with two active variables out of `p`.
pub fn linear_cells(ps: &[usize], n: usize, replicates: usize, seed: u64, tgdm: &TgdmConfig) -> Vec<Cell> {
    let mut cells = Vec::new();
    for error in [Family::Normal, Family::Cauchy] {
        for &p in ps {
            let mut coef = vec![0.0; p];
            coef[0] = 1.0;
            coef[1] = 1.0;
            let idx = cells.len();
            cells.push(Cell {
                label: format!("{} p={p} n={n}", error.label()),
                spec: SimSpec {
                    design: Design::LinearModel { coef, error },
                    n,
                    replicates,
                    seed: cell_seed(seed, idx),
                },
                sources: vec![
                    ScoreSource::Column(0),
                    ScoreSource::Column(1),
                    ScoreSource::Ols,
                    ScoreSource::Tgdm(tgdm.clone()),
                ],
                measures: vec![Measure::AucKernel, Measure::Theta],
                boot: 0,
            });
        }
    }
    cells
}
