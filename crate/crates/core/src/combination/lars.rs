use nalgebra::{DMatrix, DVector};

use super::{CombinationMethod, CombinationResult};
use crate::data::{center, Dataset};
use crate::error::{Error, Result};

const EPS: f64 = 1e-12;

/// Least-angle regression path of `z~` on the centered design `H`.
///
/// Columns are scaled to unit norm internally and coefficients mapped back.
/// Each step moves the fit along the equiangular direction of the active set
/// until an inactive variable ties in absolute correlation. Once the active
/// set reaches the rank of `H` (at most `n - 1` after centering) the last step
/// goes all the way to the least-squares fit on that set. Returns one entry
/// per step; empty when every correlation is zero.
pub fn lars_path(d: &Dataset, max_steps: usize) -> Result<Vec<CombinationResult>> {
    let p = d.p();
    if p < 2 {
        return Err(Error::InvalidArgument("LARS needs at least two variables".into()));
    }
    let (mut x, y) = center(d);
    let n = x.nrows();
    let norms: Vec<f64> = (0..p).map(|j| x.column(j).norm()).collect();
    for (j, &nj) in norms.iter().enumerate() {
        if nj > 0.0 {
            x.column_mut(j).scale_mut(1.0 / nj);
        }
    }
    let rank = x.clone().svd(false, false).rank(1e-10 * x.norm().max(1.0));
    let max_active = rank.min(n.saturating_sub(1)).min(p);

    let mut beta = DVector::<f64>::zeros(p);
    let mut fit = DVector::<f64>::zeros(n);
    let mut active: Vec<usize> = Vec::new();
    let mut path = Vec::new();

    let c0 = x.transpose() * &y;
    let (first, cmax) = argmax_abs(&c0, &active, &norms);
    if cmax <= EPS * y.norm().max(1.0) {
        return Ok(path);
    }
    active.push(first);

    while path.len() < max_steps {
        let corr = x.transpose() * (&y - &fit);
        let big_c = active.iter().map(|&j| corr[j].abs()).fold(0.0, f64::max);
        let signs: Vec<f64> = active.iter().map(|&j| corr[j].signum()).collect();
        let k = active.len();
        let xa = DMatrix::from_fn(n, k, |i, a| x[(i, active[a])] * signs[a]);
        let gram = xa.transpose() * &xa;
        let ones = DVector::from_element(k, 1.0);
        let Some(chol) = gram.cholesky() else {
            break;
        };
        let q = chol.solve(&ones);
        let a_norm = 1.0 / ones.dot(&q).sqrt();
        let w = q * a_norm;
        let u = &xa * &w;
        let a = x.transpose() * &u;

        let mut gamma = big_c / a_norm;
        let mut entering = None;
        if k < max_active {
            for j in (0..p).filter(|j| !active.contains(j) && norms[*j] > 0.0) {
                for cand in [(big_c - corr[j]) / (a_norm - a[j]), (big_c + corr[j]) / (a_norm + a[j])] {
                    if cand > EPS && cand < gamma {
                        gamma = cand;
                        entering = Some(j);
                    }
                }
            }
        }
        fit += &u * gamma;
        for (ai, &j) in active.iter().enumerate() {
            beta[j] += gamma * w[ai] * signs[ai];
        }
        path.push(CombinationResult {
            l: (0..p).map(|j| if norms[j] > 0.0 { beta[j] / norms[j] } else { 0.0 }).collect(),
            anchor: None,
            trace: Vec::new(),
            iterations: path.len() + 1,
            converged: entering.is_none(),
            method: CombinationMethod::Lars { step: path.len() + 1 },
        });
        match entering {
            Some(j) => active.push(j),
            None => break,
        }
    }
    Ok(path)
}

fn argmax_abs(c: &DVector<f64>, skip: &[usize], norms: &[f64]) -> (usize, f64) {
    let mut best = (0, 0.0);
    for j in 0..c.len() {
        if skip.contains(&j) || norms[j] == 0.0 {
            continue;
        }
        if c[j].abs() > best.1 {
            best = (j, c[j].abs());
        }
    }
    best
}
