//! Coefficient vectors `l` that make `l^T x` a strong marker for the gold standard.
//!
//! Under joint normality the maximizer of the integrated index is the
//! least-squares direction `(H^T H)^{-1} H^T z~`, available directly
//! ([`ols_combination`]) or along a least-angle path ([`lars_path`]) when the
//! design is wide. Without normality, [`tgdm_maximize`] climbs the
//! sigmoid-smoothed index by threshold gradient ascent.

mod lars;
mod ols;
mod tgdm;

use serde::{Deserialize, Serialize};

pub use lars::lars_path;
pub use ols::{ols_combination, MAX_CONDITION};
pub use tgdm::{select_anchor, tgdm_gradient, tgdm_maximize, Anchor, TgdmConfig, ThresholdRule};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CombinationMethod {
    Ols,
    Lars { step: usize },
    Tgdm { tau: f64, h: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CombinationResult {
    pub l: Vec<f64>,
    /// Variable whose coefficient is pinned to `+-1` (TGDM only).
    pub anchor: Option<usize>,
    /// Objective value after each iteration, starting from the initial point.
    pub trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub method: CombinationMethod,
}
