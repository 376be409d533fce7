use nalgebra::DVector;

use super::{CombinationMethod, CombinationResult};
use crate::data::{center, Dataset};
use crate::error::{Error, Result};

/// Largest accepted condition number of `H^T H`.
pub const MAX_CONDITION: f64 = 1e12;

/// Least-squares direction of the regression `z~ = H l + e`.
///
/// Solved through the SVD of `H`; the squared singular-value ratio is the
/// condition number of the normal equations.
pub fn ols_combination(d: &Dataset) -> Result<CombinationResult> {
    let (n, p) = (d.n(), d.p());
    if n <= p {
        return Err(Error::InvalidArgument(format!("least squares needs n > p (n = {n}, p = {p})")));
    }
    let (h, z) = center(d);
    let svd = h.svd(true, true);
    let sv = &svd.singular_values;
    let (smax, smin) = (sv.max(), sv.min());
    let condition = if smin > 0.0 { (smax / smin).powi(2) } else { f64::INFINITY };
    if !(condition <= MAX_CONDITION) {
        return Err(Error::IllConditioned { condition });
    }
    let l: DVector<f64> = svd.solve(&z, 0.0).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(CombinationResult {
        l: l.iter().copied().collect(),
        anchor: None,
        trace: Vec::new(),
        iterations: 0,
        converged: true,
        method: CombinationMethod::Ols,
    })
}
