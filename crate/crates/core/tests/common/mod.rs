//! Independent reference computations shared by the integration and
//! acceptance tests. Nothing here calls the library's own sweep, pair weights
//! or gradient code.

#![allow(dead_code)]

use integrated_auc::combination::tgdm_gradient;
use integrated_auc::density::{fit_weight, interval_masses, BandwidthRule, CutWeight, WeightSpec};
use integrated_auc::measures::{auc_integrated, auc_smoothed, classical_auc, sweep_cuts};
use integrated_auc::simgen::{generate, Design, SimSpec};
use integrated_auc::Dataset;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use statrs::function::erf::erfc;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

pub fn phi(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

pub fn phi_density(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// `A(c)` straight from the definition: ties in `y` count one half.
pub fn brute_a(y: &[f64], z: &[f64], c: f64) -> f64 {
    let mut psi = 0.0;
    let (mut n1, mut n0) = (0usize, 0usize);
    for &zi in z {
        if zi > c {
            n1 += 1;
        } else {
            n0 += 1;
        }
    }
    if n1 == 0 || n0 == 0 {
        return 0.5;
    }
    for i in (0..y.len()).filter(|&i| z[i] > c) {
        for j in (0..y.len()).filter(|&j| z[j] <= c) {
            psi += if y[i] > y[j] {
                1.0
            } else if y[i] == y[j] {
                0.5
            } else {
                0.0
            };
        }
    }
    psi / (n1 as f64 * n0 as f64)
}

/// Small data on coarse grids so that `y` and `z` both carry ties.
pub fn tied_pair(rng: &mut ChaCha8Rng) -> (Vec<f64>, Vec<f64>) {
    let n = rng.random_range(2..=30);
    let ylevels = rng.random_range(2..=8);
    let zlevels = rng.random_range(2..=8);
    let y = (0..n).map(|_| rng.random_range(0..ylevels) as f64 * 0.5).collect();
    let z = (0..n).map(|_| rng.random_range(0..zlevels) as f64 - 1.5).collect();
    (y, z)
}

/// True when the sweep equals the brute-force `A` on every interval, bit for bit.
pub fn sweep_matches_brute_force(y: &[f64], z: &[f64]) -> bool {
    let sweep = sweep_cuts(y, z).unwrap();
    let mut levels: Vec<f64> = z.to_vec();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    if sweep.cut.breaks() != levels.as_slice() {
        return false;
    }
    // one probe below every gold value, then one at each observed level
    let mut probes = vec![levels[0] - 1.0];
    probes.extend(levels.iter().copied());
    probes.iter().zip(sweep.cut.values()).all(|(&c, &v)| brute_a(y, z, c) == v)
}

/// Integral of the brute-force `A` against `w`, summed interval by interval.
pub fn brute_integral(y: &[f64], z: &[f64], w: &CutWeight) -> f64 {
    let mut levels: Vec<f64> = z.to_vec();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let masses = interval_masses(&levels, w);
    let mut probes = vec![levels[0] - 1.0];
    probes.extend(levels.iter().copied());
    probes.iter().zip(&masses).map(|(&c, m)| brute_a(y, z, c) * m).sum()
}

/// Binary gold standard with a degenerate weight strictly between its codes;
/// returns the integrated index and the classical AUC.
pub fn reduction_pair(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let n = rng.random_range(4..=60);
    let mut labels: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
    labels[0] = true;
    labels[1] = false;
    let y: Vec<f64> = (0..n).map(|_| (normal(rng) * 4.0).round() / 4.0).collect();
    let z: Vec<f64> = labels.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
    let c0 = rng.random_range(0.0..1.0);
    let w = fit_weight(&WeightSpec::Degenerate(c0), &z).unwrap();
    (auc_integrated(&y, &z, &w).unwrap().value, classical_auc(&y, &labels).unwrap())
}

/// Gaussian design with a linear signal.
pub fn linear_dataset(rng: &mut ChaCha8Rng, n: usize, p: usize) -> Dataset {
    let cols: Vec<Vec<f64>> = (0..p).map(|_| (0..n).map(|_| normal(rng)).collect()).collect();
    let z = (0..n).map(|i| cols[0][i] + 0.5 * cols.get(1).map_or(0.0, |c| c[i]) + normal(rng)).collect();
    Dataset::from_columns(cols, z).unwrap()
}

pub fn kernel_weight(z: &[f64]) -> CutWeight {
    fit_weight(&WeightSpec::Kernel(BandwidthRule::Silverman), z).unwrap()
}

/// Largest per-coordinate relative error of the analytic gradient against
/// central differences with step `eps` on the smoothed index.
pub fn gradient_relative_error(rng: &mut ChaCha8Rng, n: usize, p: usize, eps: f64) -> f64 {
    let d = linear_dataset(rng, n, p);
    let w = kernel_weight(d.z());
    let l: Vec<f64> = (0..p).map(|_| normal(rng)).collect();
    let h = 0.5;
    let g = tgdm_gradient(&d, &l, &w, h).unwrap();
    let value = |l: &[f64]| auc_smoothed(&d.project(l).unwrap(), d.z(), &w, h).unwrap().value;
    let mut worst = 0.0f64;
    for j in 0..p {
        let (mut up, mut down) = (l.clone(), l.clone());
        up[j] += eps;
        down[j] -= eps;
        let fd = (value(&up) - value(&down)) / (2.0 * eps);
        worst = worst.max((fd - g[j]).abs() / g[j].abs().max(1e-8));
    }
    worst
}

/// Largest deviation across the three invariances on one random instance:
/// a strictly increasing transform of `y` (hard index, all three weights),
/// `l -> kl` for the hard index and `(l, h) -> (kl, kh)` for the smoothed one.
pub fn invariance_deviation(rng: &mut ChaCha8Rng) -> f64 {
    let n = rng.random_range(20..=80);
    let d = linear_dataset(rng, n, 3);
    let l: Vec<f64> = (0..3).map(|_| normal(rng)).collect();
    let k = rng.random_range(0.05..20.0);
    let kl: Vec<f64> = l.iter().map(|c| k * c).collect();
    let y = d.project(&l).unwrap();
    let ky = d.project(&kl).unwrap();
    let transformed: Vec<f64> = y.iter().map(|v| v.atan() + 2.0 * v).collect();
    let mut worst = 0.0f64;
    for spec in [WeightSpec::Uniform, WeightSpec::Normal, WeightSpec::Kernel(BandwidthRule::Silverman)] {
        let w = fit_weight(&spec, d.z()).unwrap();
        let hard = auc_integrated(&y, d.z(), &w).unwrap().value;
        worst = worst.max((hard - auc_integrated(&transformed, d.z(), &w).unwrap().value).abs());
        worst = worst.max((hard - auc_integrated(&ky, d.z(), &w).unwrap().value).abs());
        let h = 0.3;
        let smooth = auc_smoothed(&y, d.z(), &w, h).unwrap().value;
        worst = worst.max((smooth - auc_smoothed(&ky, d.z(), &w, k * h).unwrap().value).abs());
    }
    worst
}

/// Population value of the normal-weighted index for a standard bivariate
/// normal with correlation `rho`, by nested Simpson quadrature:
/// `int phi(c) P(Y1 > Y2 | Z1 > c >= Z2) dc`.
pub fn population_index_quadrature(rho: f64) -> f64 {
    let k = rho / (2.0 * (1.0 - rho * rho)).sqrt();
    let simpson = |f: &dyn Fn(f64) -> f64, a: f64, b: f64, m: usize| {
        let h = (b - a) / m as f64;
        let mut s = f(a) + f(b);
        for i in 1..m {
            s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    };
    let lim = 8.5;
    let conditional = |c: f64| {
        let inner = |z1: f64| phi_density(z1) * simpson(&|z2| phi_density(z2) * phi(k * (z1 - z2)), -lim, c, 160);
        simpson(&inner, c, lim, 160) / ((1.0 - phi(c)) * phi(c))
    };
    simpson(&|c| phi_density(c) * conditional(c), -6.5, 6.5, 260)
}

/// Monte Carlo estimate of the same constant and its standard error: draw
/// the cut from the weight, then one case and one control given the cut.
pub fn population_index_monte_carlo(rho: f64, draws: usize, seed: u64) -> (f64, f64) {
    let mut rng = rng(seed);
    let k = rho / (2.0 * (1.0 - rho * rho)).sqrt();
    let inv = |p: f64| statrs::distribution::ContinuousCDF::inverse_cdf(&statrs::distribution::Normal::standard(), p);
    let (mut s, mut ss) = (0.0, 0.0);
    for _ in 0..draws {
        let c = normal(&mut rng);
        let pc = phi(c);
        let z1 = inv(pc + (1.0 - pc) * rng.random::<f64>());
        let z2 = inv(pc * rng.random::<f64>());
        let v = phi(k * (z1 - z2));
        s += v;
        ss += v * v;
    }
    let m = s / draws as f64;
    (m, ((ss / draws as f64 - m * m) / draws as f64).sqrt())
}

/// Mean absolute error of the normal-weighted index against `target` over
/// `reps` bivariate normal samples of size `n`.
pub fn drift_mae(n: usize, reps: usize, rho: f64, target: f64, seed: u64) -> f64 {
    let spec = SimSpec {
        design: Design::BivariateNormal { mu1: 1.0, mu2: 1.0, sigma1: 1.0, sigma2: 1.0, rho },
        n,
        replicates: reps,
        seed,
    };
    let total: f64 = (0..reps)
        .map(|r| {
            let d = generate(&spec, r).unwrap();
            let w = fit_weight(&WeightSpec::Normal, d.z()).unwrap();
            (auc_integrated(d.column(0), d.z(), &w).unwrap().value - target).abs()
        })
        .sum();
    total / reps as f64
}
