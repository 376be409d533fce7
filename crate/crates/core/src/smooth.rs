//! Pair-weight form of the integrated index.
//!
//! For a fixed gold standard and weight, the integrated index is a weighted
//! sum over ordered subject pairs `(i, j)` with `z_i > z_j`:
//!
//! ```text
//! A_I = tail/2 + sum_{z_i > z_j} W_ij * K(y_i - y_j)
//! W_ij = sum over intervals k where z_j <= t < z_i of mass_k / (n1_k * n0_k)
//! ```
//!
//! where `K` is `psi` for the hard index or `S(. / h)` for the smoothed one and
//! `tail` is the weight mass on intervals with an empty case or control group.
//! The weights depend only on `z` and the cut weight, so an optimizer over
//! `l` computes them once.

use crate::data::Dataset;
use crate::density::{interval_masses, CutWeight};
use crate::error::{Error, Result};
use crate::util::{sigmoid, sigmoid_deriv};

#[derive(Debug, Clone)]
pub struct PairWeights {
    /// Subject with the larger gold value.
    pub upper: Vec<u32>,
    pub lower: Vec<u32>,
    pub weight: Vec<f64>,
    /// Weight mass where one group is empty; contributes `0.5 * tail`.
    pub tail: f64,
}

impl PairWeights {
    pub fn new(z: &[f64], w: &CutWeight) -> Result<Self> {
        let n = z.len();
        if n < 2 {
            return Err(Error::TooFewRows { needed: 2, found: n });
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| z[a].total_cmp(&z[b]));
        // distinct values and 1-based rank of each subject
        let mut breaks: Vec<f64> = Vec::new();
        let mut counts: Vec<usize> = Vec::new();
        let mut rank = vec![0usize; n];
        for &i in &order {
            if breaks.last() != Some(&z[i]) {
                breaks.push(z[i]);
                counts.push(0);
            }
            *counts.last_mut().unwrap() += 1;
            rank[i] = breaks.len();
        }
        let m = breaks.len();
        let masses = interval_masses(&breaks, w);

        // omega_prefix[k] = sum_{k' = 1..=k} mass_k' / (n1 n0), interior intervals only
        let mut omega_prefix = vec![0.0; m];
        let mut n0 = 0usize;
        for k in 1..m {
            n0 += counts[k - 1];
            let n1 = n - n0;
            omega_prefix[k] = omega_prefix[k - 1] + masses[k] / (n1 as f64 * n0 as f64);
        }
        let tail = masses[0] + masses[m];

        let mut upper = Vec::new();
        let mut lower = Vec::new();
        let mut weight = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if rank[i] > rank[j] {
                    let wij = omega_prefix[rank[i] - 1] - omega_prefix[rank[j] - 1];
                    if wij > 0.0 {
                        upper.push(i as u32);
                        lower.push(j as u32);
                        weight.push(wij);
                    }
                }
            }
        }
        Ok(Self { upper, lower, weight, tail })
    }

    pub fn len(&self) -> usize {
        self.weight.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weight.is_empty()
    }

    /// Hard index of scores `y` (ties count one half).
    pub fn hard_value(&self, y: &[f64]) -> f64 {
        let mut s = 0.5 * self.tail;
        for k in 0..self.len() {
            let d = y[self.upper[k] as usize] - y[self.lower[k] as usize];
            let psi = if d > 0.0 {
                1.0
            } else if d == 0.0 {
                0.5
            } else {
                0.0
            };
            s += self.weight[k] * psi;
        }
        s
    }

    /// Sigmoid-smoothed index of scores `y` with bandwidth `h`.
    pub fn smooth_value(&self, y: &[f64], h: f64) -> f64 {
        let mut s = 0.5 * self.tail;
        for k in 0..self.len() {
            let d = y[self.upper[k] as usize] - y[self.lower[k] as usize];
            s += self.weight[k] * sigmoid(d / h);
        }
        s
    }
}

/// Smoothed index of `l^T x` as a function of `l`, with its exact gradient.
#[derive(Debug, Clone)]
pub struct SmoothObjective {
    pairs: PairWeights,
    /// Row-major `pairs.len() x p` matrix of `x_upper - x_lower`.
    deltas: Vec<f64>,
    p: usize,
}

impl SmoothObjective {
    pub fn new(d: &Dataset, w: &CutWeight) -> Result<Self> {
        let pairs = PairWeights::new(d.z(), w)?;
        let p = d.p();
        let mut deltas = Vec::with_capacity(pairs.len() * p);
        for k in 0..pairs.len() {
            let (i, j) = (pairs.upper[k] as usize, pairs.lower[k] as usize);
            deltas.extend(d.columns().iter().map(|c| c[i] - c[j]));
        }
        Ok(Self { pairs, deltas, p })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    fn projected(&self, l: &[f64], k: usize) -> f64 {
        let row = &self.deltas[k * self.p..(k + 1) * self.p];
        row.iter().zip(l).map(|(a, b)| a * b).sum()
    }

    pub fn value(&self, l: &[f64], h: f64) -> f64 {
        debug_assert_eq!(l.len(), self.p);
        let mut s = 0.5 * self.pairs.tail;
        for k in 0..self.pairs.len() {
            s += self.pairs.weight[k] * sigmoid(self.projected(l, k) / h);
        }
        s
    }

    /// `sum_k W_k S'(l^T dx_k / h) dx_k / h`.
    pub fn gradient(&self, l: &[f64], h: f64) -> Vec<f64> {
        debug_assert_eq!(l.len(), self.p);
        let mut g = vec![0.0; self.p];
        for k in 0..self.pairs.len() {
            let c = self.pairs.weight[k] * sigmoid_deriv(self.projected(l, k) / h) / h;
            let row = &self.deltas[k * self.p..(k + 1) * self.p];
            for (gj, dj) in g.iter_mut().zip(row) {
                *gj += c * dj;
            }
        }
        g
    }
}
