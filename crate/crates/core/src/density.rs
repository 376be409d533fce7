//! Weight densities over cutting points and exact integration of step
//! functions against them.
//!
//! The AUC at cut `c` is constant between consecutive distinct gold values,
//! so integrating it against a weight reduces to a sum of interval values
//! times interval masses. Interval masses come from CDF differences, which
//! leaves no quadrature error.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::util::{mean, normal_cdf, normal_pdf, sample_sd};

/// Silverman's reference-rule constant for a Gaussian kernel.
const SILVERMAN: f64 = 1.06;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WeightKind {
    Uniform,
    Normal,
    Kernel,
    Degenerate,
    DiscreteMass,
    Empirical,
}

impl WeightKind {
    pub fn label(self) -> &'static str {
        match self {
            WeightKind::Uniform => "uniform",
            WeightKind::Normal => "normal",
            WeightKind::Kernel => "kernel",
            WeightKind::Degenerate => "degenerate",
            WeightKind::DiscreteMass => "discrete",
            WeightKind::Empirical => "empirical",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub enum BandwidthRule {
    /// `1.06 * sd * n^(-1/5)`.
    #[default]
    Silverman,
    Fixed(f64),
}

/// Which side of an atom the step function is read at when the atom sits
/// exactly on a breakpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum AtomPairing {
    /// Value on the interval ending at the atom (left limit).
    #[default]
    LeftLimit,
    /// Value on the interval starting at the atom, i.e. `z <= c` counts as control.
    RightLimit,
}

/// What to fit; [`fit_weight`] turns this into a [`CutWeight`] for a given `z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum WeightSpec {
    Uniform,
    Normal,
    Kernel(BandwidthRule),
    Degenerate(f64),
    Empirical(AtomPairing),
}

impl WeightSpec {
    pub fn kind(&self) -> WeightKind {
        match self {
            WeightSpec::Uniform => WeightKind::Uniform,
            WeightSpec::Normal => WeightKind::Normal,
            WeightSpec::Kernel(_) => WeightKind::Kernel,
            WeightSpec::Degenerate(_) => WeightKind::Degenerate,
            WeightSpec::Empirical(_) => WeightKind::Empirical,
        }
    }
}

impl std::fmt::Display for WeightSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            WeightSpec::Uniform => f.write_str("uniform"),
            WeightSpec::Normal => f.write_str("normal"),
            WeightSpec::Kernel(BandwidthRule::Silverman) => f.write_str("kernel"),
            WeightSpec::Kernel(BandwidthRule::Fixed(b)) => write!(f, "kernel:{b}"),
            WeightSpec::Degenerate(c) => write!(f, "degenerate:{c}"),
            WeightSpec::Empirical(AtomPairing::LeftLimit) => f.write_str("empirical"),
            WeightSpec::Empirical(AtomPairing::RightLimit) => f.write_str("empirical:right"),
        }
    }
}

impl std::str::FromStr for WeightSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("unknown weight {s:?}"));
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let num = |a: &str| a.parse::<f64>().map_err(|_| bad());
        match (head, arg) {
            ("uniform", None) => Ok(WeightSpec::Uniform),
            ("normal", None) => Ok(WeightSpec::Normal),
            ("kernel", None) => Ok(WeightSpec::Kernel(BandwidthRule::Silverman)),
            ("kernel", Some(a)) => Ok(WeightSpec::Kernel(BandwidthRule::Fixed(num(a)?))),
            ("degenerate", Some(a)) => Ok(WeightSpec::Degenerate(num(a)?)),
            ("empirical", None) | ("empirical", Some("left")) => Ok(WeightSpec::Empirical(AtomPairing::LeftLimit)),
            ("empirical", Some("right")) => Ok(WeightSpec::Empirical(AtomPairing::RightLimit)),
            _ => Err(bad()),
        }
    }
}

/// A probability distribution over cutting points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CutWeight {
    /// Uniform on `(mean - sd, mean + sd)`.
    UniformAroundMean {
        mean: f64,
        sd: f64,
    },
    NormalFit {
        mean: f64,
        sd: f64,
    },
    /// Gaussian kernel estimate: equal-weight normals at `centers`.
    KernelFit {
        centers: Vec<f64>,
        bandwidth: f64,
    },
    Degenerate {
        at: f64,
    },
    /// Atoms at sorted distinct `points`.
    DiscreteMass {
        points: Vec<f64>,
        masses: Vec<f64>,
        pairing: AtomPairing,
    },
    /// Empirical distribution of the gold standard.
    EmpiricalCdf {
        points: Vec<f64>,
        masses: Vec<f64>,
        pairing: AtomPairing,
    },
}

fn check_spread(z: &[f64]) -> Result<(f64, f64)> {
    if z.is_empty() {
        return Err(Error::InvalidArgument("empty gold-standard vector".into()));
    }
    if z.len() < 2 {
        return Err(Error::TooFewRows { needed: 2, found: z.len() });
    }
    let sd = sample_sd(z);
    if !(sd > 0.0) || !sd.is_finite() {
        return Err(Error::ZeroVariance("gold standard".into()));
    }
    Ok((mean(z), sd))
}

/// Silverman bandwidth `1.06 * sd * n^(-1/5)`.
pub fn silverman_bandwidth(z: &[f64]) -> Result<f64> {
    let (_, sd) = check_spread(z)?;
    Ok(SILVERMAN * sd * (z.len() as f64).powf(-0.2))
}

/// Fits the weight described by `spec` to the gold-standard sample `z`.
pub fn fit_weight(spec: &WeightSpec, z: &[f64]) -> Result<CutWeight> {
    match *spec {
        WeightSpec::Uniform => {
            let (mean, sd) = check_spread(z)?;
            Ok(CutWeight::UniformAroundMean { mean, sd })
        }
        WeightSpec::Normal => {
            let (mean, sd) = check_spread(z)?;
            Ok(CutWeight::NormalFit { mean, sd })
        }
        WeightSpec::Kernel(rule) => {
            let bandwidth = match rule {
                BandwidthRule::Silverman => silverman_bandwidth(z)?,
                BandwidthRule::Fixed(b) if b > 0.0 && b.is_finite() => {
                    check_spread(z)?;
                    b
                }
                BandwidthRule::Fixed(b) => return Err(Error::InvalidArgument(format!("bandwidth {b} must be > 0"))),
            };
            Ok(CutWeight::KernelFit { centers: z.to_vec(), bandwidth })
        }
        WeightSpec::Degenerate(at) => CutWeight::degenerate(at),
        WeightSpec::Empirical(pairing) => CutWeight::empirical(z, pairing),
    }
}

impl CutWeight {
    pub fn degenerate(at: f64) -> Result<Self> {
        if !at.is_finite() {
            return Err(Error::InvalidArgument("degenerate cut must be finite".into()));
        }
        Ok(CutWeight::Degenerate { at })
    }

    /// Atoms at `points` with `masses`; masses must be nonnegative and sum to 1.
    pub fn discrete(points: Vec<f64>, masses: Vec<f64>, pairing: AtomPairing) -> Result<Self> {
        if points.len() != masses.len() {
            return Err(Error::LengthMismatch { left: points.len(), right: masses.len() });
        }
        if points.is_empty() {
            return Err(Error::InvalidArgument("discrete weight needs at least one atom".into()));
        }
        if masses.iter().any(|m| !(*m >= 0.0)) || points.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidArgument("atoms must be finite with nonnegative mass".into()));
        }
        let total: f64 = masses.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("masses sum to {total}, not 1")));
        }
        let (points, masses) = merge_atoms(points, masses);
        Ok(CutWeight::DiscreteMass { points, masses, pairing })
    }

    /// Empirical distribution of `z`, mass `1/n` per observation.
    pub fn empirical(z: &[f64], pairing: AtomPairing) -> Result<Self> {
        if z.is_empty() {
            return Err(Error::InvalidArgument("empty gold-standard vector".into()));
        }
        let w = 1.0 / z.len() as f64;
        let (points, masses) = merge_atoms(z.to_vec(), vec![w; z.len()]);
        Ok(CutWeight::EmpiricalCdf { points, masses, pairing })
    }

    pub fn kind(&self) -> WeightKind {
        match self {
            CutWeight::UniformAroundMean { .. } => WeightKind::Uniform,
            CutWeight::NormalFit { .. } => WeightKind::Normal,
            CutWeight::KernelFit { .. } => WeightKind::Kernel,
            CutWeight::Degenerate { .. } => WeightKind::Degenerate,
            CutWeight::DiscreteMass { .. } => WeightKind::DiscreteMass,
            CutWeight::EmpiricalCdf { .. } => WeightKind::Empirical,
        }
    }

    /// Kernel bandwidth, if any.
    pub fn bandwidth(&self) -> Option<f64> {
        match self {
            CutWeight::KernelFit { bandwidth, .. } => Some(*bandwidth),
            _ => None,
        }
    }

    /// Density at `t` for the continuous kinds; `None` for atoms.
    pub fn pdf(&self, t: f64) -> Option<f64> {
        match self {
            CutWeight::UniformAroundMean { mean, sd } => Some(if (t - mean).abs() < *sd { 0.5 / sd } else { 0.0 }),
            CutWeight::NormalFit { mean, sd } => Some(normal_pdf((t - mean) / sd) / sd),
            CutWeight::KernelFit { centers, bandwidth } => {
                let s: f64 = centers.iter().map(|c| normal_pdf((t - c) / bandwidth)).sum();
                Some(s / (centers.len() as f64 * bandwidth))
            }
            _ => None,
        }
    }

    /// `P(T <= t)`.
    pub fn cdf(&self, t: f64) -> f64 {
        self.cdf_inner(t, true)
    }

    /// `P(T < t)`; equals [`cdf`](Self::cdf) for continuous kinds.
    pub fn cdf_left(&self, t: f64) -> f64 {
        self.cdf_inner(t, false)
    }

    fn cdf_inner(&self, t: f64, inclusive: bool) -> f64 {
        if t == f64::INFINITY {
            return 1.0;
        }
        if t == f64::NEG_INFINITY {
            return 0.0;
        }
        match self {
            CutWeight::UniformAroundMean { mean, sd } => ((t - (mean - sd)) / (2.0 * sd)).clamp(0.0, 1.0),
            CutWeight::NormalFit { mean, sd } => normal_cdf((t - mean) / sd),
            CutWeight::KernelFit { centers, bandwidth } => {
                let s: f64 = centers.iter().map(|c| normal_cdf((t - c) / bandwidth)).sum();
                s / centers.len() as f64
            }
            CutWeight::Degenerate { at } => {
                if t > *at || (inclusive && t == *at) {
                    1.0
                } else {
                    0.0
                }
            }
            CutWeight::DiscreteMass { points, masses, .. } | CutWeight::EmpiricalCdf { points, masses, .. } => {
                let k =
                    if inclusive { points.partition_point(|&p| p <= t) } else { points.partition_point(|&p| p < t) };
                if k == points.len() {
                    1.0
                } else {
                    masses[..k].iter().sum()
                }
            }
        }
    }

    fn pairing(&self) -> AtomPairing {
        match self {
            CutWeight::DiscreteMass { pairing, .. } | CutWeight::EmpiricalCdf { pairing, .. } => *pairing,
            // a point mass is read where the cut rule puts it: z <= c is a control
            _ => AtomPairing::RightLimit,
        }
    }
}

fn merge_atoms(points: Vec<f64>, masses: Vec<f64>) -> (Vec<f64>, Vec<f64>) {
    let mut pairs: Vec<(f64, f64)> = points.into_iter().zip(masses).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut pts: Vec<f64> = Vec::with_capacity(pairs.len());
    let mut ms: Vec<f64> = Vec::with_capacity(pairs.len());
    for (p, m) in pairs {
        if pts.last() == Some(&p) {
            *ms.last_mut().unwrap() += m;
        } else {
            pts.push(p);
            ms.push(m);
        }
    }
    (pts, ms)
}

/// Piecewise-constant function: `values[k]` holds on `[breaks[k-1], breaks[k])`
/// with `breaks[-1] = -inf` and `breaks[m] = +inf`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepFunction {
    breaks: Vec<f64>,
    values: Vec<f64>,
}

impl StepFunction {
    pub fn new(breaks: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.len() != breaks.len() + 1 {
            return Err(Error::LengthMismatch { left: values.len(), right: breaks.len() + 1 });
        }
        if breaks.windows(2).any(|w| !(w[0] < w[1])) || breaks.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidArgument("breakpoints must be finite and strictly increasing".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("step values must be finite".into()));
        }
        Ok(Self { breaks, values })
    }

    pub fn constant(v: f64) -> Self {
        Self { breaks: Vec::new(), values: vec![v] }
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value at `t`; right-continuous at breakpoints.
    pub fn eval(&self, t: f64) -> f64 {
        self.values[self.breaks.partition_point(|&b| b <= t)]
    }
}

/// Mass `w` assigns to each interval of a step function with these breakpoints.
///
/// Atoms sitting exactly on a breakpoint go to the interval chosen by the
/// weight's [`AtomPairing`].
pub fn interval_masses(breaks: &[f64], w: &CutWeight) -> Vec<f64> {
    let cdf = |t: f64| match w.pairing() {
        AtomPairing::RightLimit => w.cdf_left(t),
        AtomPairing::LeftLimit => w.cdf(t),
    };
    let mut out = Vec::with_capacity(breaks.len() + 1);
    let mut prev = 0.0;
    for &b in breaks {
        let c = cdf(b);
        out.push(c - prev);
        prev = c;
    }
    out.push(1.0 - prev);
    out
}

/// `sum_k v_k * mass_k`: the exact integral of `f` against `w`.
pub fn integrate_step(f: &StepFunction, w: &CutWeight) -> f64 {
    interval_masses(&f.breaks, w).iter().zip(&f.values).map(|(m, v)| m * v).sum()
}
