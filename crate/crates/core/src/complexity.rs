//! Topological complexity: the closed form `c(sigma)`, its Monte-Carlo
//! quadrature, the critical-ball radius, the modified sigmoid, and the
//! log-determinant estimator.

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::io::{fmt_real, CsvTable};
use crate::netmodel::{BaseSigmoid, ModifiedSigmoid, SigmoidSpec};
use crate::randmat::{log_abs_det_shifted, ConnectivityMatrix};
use crate::rng::{derive_seed, SeedStream};
use crate::stats::RunningStats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Quadrature,
    KacRiceMc,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::Quadrature => "quadrature",
            Method::KacRiceMc => "kac_rice_mc",
        }
    }
}

/// Per-neuron log-count (nats) with its uncertainty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexityEstimate {
    pub sigma: f64,
    /// 0 for analytic values.
    pub n: usize,
    pub value: f64,
    pub stderr: f64,
    pub method: Method,
    pub samples: usize,
    /// Realizations with an exactly singular `J - I`, excluded from the mean.
    pub singular_excluded: usize,
}

impl ComplexityEstimate {
    pub const CSV_HEADER: [&'static str; 6] = ["sigma", "n", "method", "value", "stderr", "samples"];

    pub fn csv_row(&self) -> Vec<String> {
        vec![
            fmt_real(self.sigma),
            self.n.to_string(),
            self.method.as_str().to_string(),
            fmt_real(self.value),
            fmt_real(self.stderr),
            self.samples.to_string(),
        ]
    }
}

pub fn estimates_to_csv(estimates: &[ComplexityEstimate]) -> CsvTable {
    let mut t = CsvTable::new(&ComplexityEstimate::CSV_HEADER);
    for e in estimates {
        t.push(e.csv_row());
    }
    t
}

/// `c(sigma) = log sigma + (1/sigma^2 - 1)/2` above 1, zero below.
pub fn c_closed_form(sigma: f64) -> f64 {
    if sigma <= 1.0 {
        0.0
    } else {
        sigma.ln() + 0.5 * (1.0 / (sigma * sigma) - 1.0)
    }
}

pub fn closed_form_estimate(sigma: f64) -> ComplexityEstimate {
    ComplexityEstimate {
        sigma,
        n: 0,
        value: c_closed_form(sigma),
        stderr: 0.0,
        method: Method::ClosedForm,
        samples: 0,
        singular_excluded: 0,
    }
}

/// Monte-Carlo mean of `log |z - 1|` over `z` uniform in the disc of radius
/// `sigma`.
pub fn c_quadrature(sigma: f64, n_points: usize, seed: u64) -> Result<ComplexityEstimate> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(invalid("sigma", format!("must be positive, got {sigma}")));
    }
    if n_points < 100 {
        return Err(invalid("n_points", format!("need at least 100, got {n_points}")));
    }
    let mut rng = SeedStream::new(seed);
    let mut stats = RunningStats::new();
    for _ in 0..n_points {
        let (x, y) = rng.in_disc(sigma);
        stats.push((x - 1.0).hypot(y).ln());
    }
    Ok(ComplexityEstimate {
        sigma,
        n: 0,
        value: stats.mean,
        stderr: stats.stderr(),
        method: Method::Quadrature,
        samples: n_points,
        singular_excluded: 0,
    })
}

/// Midpoint-rule value of `∫_0^{2π} log |a - b e^{iθ}| dθ`.
///
/// Nodes sit at `θ_k = 2π (k + 1/2) / N`, which keeps the rule spectrally
/// accurate for `a != b` and away from the logarithmic singularity at
/// `θ = 0` when `a == b`. The limit is `2π log max(a, b)`.
pub fn harmonic_circle_integral(a: f64, b: f64, n_points: usize) -> f64 {
    let n = n_points.max(1);
    let h = TAU / n as f64;
    (0..n)
        .map(|k| {
            let theta = (k as f64 + 0.5) * h;
            // |a - b e^{iθ}|^2 = a^2 + b^2 - 2ab cos θ
            0.5 * (a * a + b * b - 2.0 * a * b * theta.cos()).ln()
        })
        .sum::<f64>()
        * h
}

/// Positive root of `x / sigma = S(x)`; 0 when `sigma <= 1`.
pub fn rho_of_epsilon(sigma: f64, base: BaseSigmoid) -> f64 {
    if sigma <= 1.0 || !sigma.is_finite() {
        return 0.0;
    }
    let g = |x: f64| base.value(x) - x / sigma;
    let mut hi = 10.0;
    while g(hi) > 0.0 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    // g > 0 on (0, root) because S'(0) = 1 > 1/sigma and S is concave there
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn default_eta(rho: f64) -> f64 {
    0.1 * rho
}

/// Modified tanh sigmoid for disorder `sigma`, blend width `eta`.
pub fn build_modified_sigmoid(sigma: f64, eta: f64) -> Result<SigmoidSpec> {
    build_modified_sigmoid_with(BaseSigmoid::Tanh, sigma, eta)
}

pub fn build_modified_sigmoid_with(base: BaseSigmoid, sigma: f64, eta: f64) -> Result<SigmoidSpec> {
    if !(sigma > 1.0) {
        return Err(invalid("sigma", format!("must exceed 1, got {sigma}")));
    }
    let rho = rho_of_epsilon(sigma, base);
    Ok(SigmoidSpec::Modified(ModifiedSigmoid::new(base, sigma, rho, eta)?))
}

/// Mean and standard error of `(1/n) log |det(-I + J)|` over independent
/// matrices. Matrix `i` uses seed `derive_seed(seed, i)`.
pub fn kac_rice_mc(n: usize, sigma: f64, n_matrices: usize, seed: u64) -> Result<ComplexityEstimate> {
    if n < 2 {
        return Err(invalid("n", format!("need at least 2, got {n}")));
    }
    if n_matrices < 2 {
        return Err(invalid("n_matrices", format!("need at least 2, got {n_matrices}")));
    }
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(invalid("sigma", format!("must be positive, got {sigma}")));
    }
    let values: Vec<Result<Option<f64>>> = (0..n_matrices as u64)
        .into_par_iter()
        .map(|i| {
            let j = ConnectivityMatrix::sample(n, sigma, derive_seed(seed, i))?;
            let ld = log_abs_det_shifted(&j);
            Ok((!ld.singular).then_some(ld.per_dim))
        })
        .collect();
    let mut stats = RunningStats::new();
    let mut singular = 0;
    for v in values {
        match v? {
            Some(x) => stats.push(x),
            None => singular += 1,
        }
    }
    Ok(ComplexityEstimate {
        sigma,
        n,
        value: stats.mean,
        stderr: stats.stderr(),
        method: Method::KacRiceMc,
        samples: stats.count as usize,
        singular_excluded: singular,
    })
}

/// `sigma > 1` solving `n (sigma - 1)^2 = target_nats`.
pub fn edge_thickness(n: usize, target_nats: f64) -> Result<f64> {
    if n == 0 {
        return Err(invalid("n", "must be at least 1"));
    }
    if !(target_nats > 0.0) || !target_nats.is_finite() {
        return Err(invalid("target_nats", format!("must be positive, got {target_nats}")));
    }
    Ok(1.0 + (target_nats / n as f64).sqrt())
}
