//! Bootstrap variance of any scalar index and Wald-type tests against a null value.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::util::{sample_variance, stream_rng};

/// A scalar index computed from a whole dataset.
pub trait Statistic: Sync {
    fn name(&self) -> String;
    fn evaluate(&self, d: &Dataset) -> Result<f64>;
}

/// A closure with a name.
pub struct FnStatistic<F> {
    name: String,
    f: F,
}

impl<F> FnStatistic<F>
where
    F: Fn(&Dataset) -> Result<f64> + Sync,
{
    pub fn new(name: impl Into<String>, f: F) -> Self {
        Self { name: name.into(), f }
    }
}

impl<F> Statistic for FnStatistic<F>
where
    F: Fn(&Dataset) -> Result<f64> + Sync,
{
    fn name(&self) -> String {
        self.name.clone()
    }

    fn evaluate(&self, d: &Dataset) -> Result<f64> {
        (self.f)(d)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapReport {
    pub statistic: String,
    pub point: f64,
    pub variance: f64,
    /// Replicates that evaluated successfully.
    pub replicates: usize,
    pub dropped: usize,
    pub seed: u64,
}

impl BootstrapReport {
    pub fn sd(&self) -> f64 {
        self.variance.sqrt()
    }
}

/// Largest tolerated fraction of failed replicates.
pub const MAX_DROP_FRACTION: f64 = 0.10;

/// Row indices of bootstrap replicate `b`; the same for every `(seed, b)`.
pub fn resample_indices(n: usize, seed: u64, b: usize) -> Vec<usize> {
    use rand::Rng;
    let mut rng = stream_rng(seed, b as u64);
    (0..n).map(|_| rng.random_range(0..n)).collect()
}

/// Pairs bootstrap: resamples rows `(x_i, z_i)` jointly `b` times and returns
/// the sample variance of the statistic across replicates.
///
/// Anything fitted from the data (cut weights included) is refitted inside
/// the statistic on each replicate. Replicate `k` draws from its own stream, so
/// the result does not depend on scheduling.
pub fn bootstrap_variance(d: &Dataset, stat: &dyn Statistic, b: usize, seed: u64) -> Result<BootstrapReport> {
    if b < 2 {
        return Err(Error::InvalidArgument("bootstrap needs at least 2 replicates".into()));
    }
    let point = stat.evaluate(d)?;
    let n = d.n();
    let draws: Vec<Option<f64>> = (0..b)
        .into_par_iter()
        .map(|k| {
            let rows = resample_indices(n, seed, k);
            stat.evaluate(&d.select_rows(&rows)).ok().filter(|v| v.is_finite())
        })
        .collect();
    let values: Vec<f64> = draws.iter().flatten().copied().collect();
    let dropped = b - values.len();
    if dropped as f64 > MAX_DROP_FRACTION * b as f64 || values.len() < 2 {
        return Err(Error::BootstrapFailures { dropped, total: b });
    }
    Ok(BootstrapReport {
        statistic: stat.name(),
        point,
        variance: sample_variance(&values),
        replicates: values.len(),
        dropped,
        seed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaldTest {
    pub statistic: f64,
    pub p_value: f64,
}

/// `(point - null)^2 / variance` against chi-square with one degree of freedom.
pub fn wald_test(point: f64, variance: f64, null_value: f64) -> Result<WaldTest> {
    if !(variance > 0.0) {
        return Err(Error::DegenerateTest);
    }
    let statistic = (point - null_value).powi(2) / variance;
    Ok(WaldTest { statistic, p_value: chi2_1_sf(statistic) })
}

/// Wald p-value that also covers a zero bootstrap variance: every replicate
/// agreed, so the point is either exactly the null (`1`) or rejected (`0`).
pub fn wald_p_value(point: f64, variance: f64, null_value: f64) -> f64 {
    match wald_test(point, variance, null_value) {
        Ok(t) => t.p_value,
        Err(_) if point == null_value => 1.0,
        Err(_) => 0.0,
    }
}

/// Upper tail of chi-square(1): `erfc(sqrt(x / 2))`, accurate far into the tail.
pub fn chi2_1_sf(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    statrs::function::erf::erfc((x / 2.0).sqrt())
}
