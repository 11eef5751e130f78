//! Fakir bed: a frictionless particle in the plane scattering off `k`
//! Gaussian hills, confined by a smooth power-law wall.
//!
//! `H = |p|^2 / 2 + U(q)` with
//! `U(q) = sum_a A exp(-|q - c_a|^2 / (2 w^2)) + A_w (|q|^2 / R^2)^m`.
//! Trajectories use velocity Verlet; the maximal exponent uses the exact
//! tangent map of the Verlet step, so the Hessian of `U` drives the
//! variational flow.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::io::{fmt_real, CsvTable};
use crate::ode::step_count;
use crate::rng::{derive_seed, SeedStream};
use crate::stats::{linear_regression, LinearFit, RunningStats};

pub type Vec2 = [f64; 2];
pub type Mat2 = [[f64; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FakirParams {
    /// Hill height `A`.
    pub amplitude: f64,
    /// Hill width `w`.
    pub width: f64,
    /// Hill centers are uniform in the disc of this radius.
    pub placement_radius: f64,
    /// Wall scale `R`.
    pub confinement_radius: f64,
    /// Wall exponent `m`.
    pub wall_exponent: i32,
    /// Wall amplitude `A_w`.
    pub wall_amplitude: f64,
    /// Total energy of the particle.
    pub energy: f64,
}

impl Default for FakirParams {
    fn default() -> Self {
        Self {
            amplitude: 1.0,
            width: 0.3,
            placement_radius: 5.0,
            confinement_radius: 6.0,
            wall_exponent: 4,
            wall_amplitude: 10.0,
            energy: 0.5,
        }
    }
}

impl FakirParams {
    fn validate(&self) -> Result<()> {
        let positive = [
            ("amplitude", self.amplitude),
            ("width", self.width),
            ("placement_radius", self.placement_radius),
            ("confinement_radius", self.confinement_radius),
            ("wall_amplitude", self.wall_amplitude),
            ("energy", self.energy),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(invalid(name, format!("must be positive, got {v}")));
            }
        }
        if self.confinement_radius <= self.placement_radius {
            return Err(invalid("confinement_radius", "must exceed the placement radius"));
        }
        if self.wall_exponent < 1 {
            return Err(invalid("wall_exponent", "must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FakirLandscape {
    pub centers: Vec<Vec2>,
    pub params: FakirParams,
    pub seed: u64,
}

impl FakirLandscape {
    pub fn k(&self) -> usize {
        self.centers.len()
    }
}

pub fn sample_landscape(k: usize, params: &FakirParams, seed: u64) -> Result<FakirLandscape> {
    params.validate()?;
    let mut rng = SeedStream::new(seed);
    let centers = (0..k)
        .map(|_| {
            let (x, y) = rng.in_disc(params.placement_radius);
            [x, y]
        })
        .collect();
    Ok(FakirLandscape {
        centers,
        params: *params,
        seed,
    })
}

/// Value and gradient of `U`.
pub fn potential(l: &FakirLandscape, q: Vec2) -> (f64, Vec2) {
    let p = &l.params;
    let inv_w2 = 1.0 / (p.width * p.width);
    let mut u = 0.0;
    let mut g = [0.0, 0.0];
    for c in &l.centers {
        let d = [q[0] - c[0], q[1] - c[1]];
        let h = p.amplitude * (-0.5 * (d[0] * d[0] + d[1] * d[1]) * inv_w2).exp();
        u += h;
        g[0] -= h * d[0] * inv_w2;
        g[1] -= h * d[1] * inv_w2;
    }
    let inv_r2 = 1.0 / (p.confinement_radius * p.confinement_radius);
    let s = (q[0] * q[0] + q[1] * q[1]) * inv_r2;
    let m = p.wall_exponent;
    u += p.wall_amplitude * s.powi(m);
    let dw = p.wall_amplitude * m as f64 * s.powi(m - 1) * 2.0 * inv_r2;
    g[0] += dw * q[0];
    g[1] += dw * q[1];
    (u, g)
}

/// Gradient and Hessian of `U`.
pub fn gradient_hessian(l: &FakirLandscape, q: Vec2) -> (Vec2, Mat2) {
    let p = &l.params;
    let inv_w2 = 1.0 / (p.width * p.width);
    let mut g = [0.0, 0.0];
    let mut hess = [[0.0; 2]; 2];
    for c in &l.centers {
        let d = [q[0] - c[0], q[1] - c[1]];
        let h = p.amplitude * (-0.5 * (d[0] * d[0] + d[1] * d[1]) * inv_w2).exp();
        g[0] -= h * d[0] * inv_w2;
        g[1] -= h * d[1] * inv_w2;
        for a in 0..2 {
            for b in 0..2 {
                let delta = if a == b { 1.0 } else { 0.0 };
                hess[a][b] += h * (d[a] * d[b] * inv_w2 * inv_w2 - delta * inv_w2);
            }
        }
    }
    let inv_r2 = 1.0 / (p.confinement_radius * p.confinement_radius);
    let s = (q[0] * q[0] + q[1] * q[1]) * inv_r2;
    let m = p.wall_exponent;
    let mf = m as f64;
    let first = p.wall_amplitude * mf * s.powi(m - 1) * 2.0 * inv_r2;
    let second = if m >= 2 {
        p.wall_amplitude * mf * (mf - 1.0) * s.powi(m - 2) * 4.0 * inv_r2 * inv_r2
    } else {
        0.0
    };
    for a in 0..2 {
        g[a] += first * q[a];
        for b in 0..2 {
            let delta = if a == b { 1.0 } else { 0.0 };
            hess[a][b] += second * q[a] * q[b] + first * delta;
        }
    }
    (g, hess)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParticleState {
    pub q: Vec2,
    pub p: Vec2,
    pub t: f64,
}

pub fn energy(l: &FakirLandscape, s: &ParticleState) -> f64 {
    0.5 * (s.p[0] * s.p[0] + s.p[1] * s.p[1]) + potential(l, s.q).0
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParticleTrajectory {
    pub states: Vec<ParticleState>,
    /// `max_t |H(t) - H(0)| / |H(0)|` over every step, stored or not.
    pub max_energy_drift: f64,
}

fn finite(s: &ParticleState) -> bool {
    s.q.iter().chain(s.p.iter()).all(|v| v.is_finite())
}

/// Velocity-Verlet integration of `q' = p`, `p' = -grad U(q)`.
pub fn integrate_particle(
    l: &FakirLandscape,
    state0: &ParticleState,
    dt: f64,
    t_end: f64,
    store_every: usize,
) -> Result<ParticleTrajectory> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(invalid("dt", format!("must be positive, got {dt}")));
    }
    if !(t_end >= 0.0) {
        return Err(invalid("t_end", format!("must be non-negative, got {t_end}")));
    }
    let store_every = store_every.max(1);
    let h0 = energy(l, state0);
    let scale = h0.abs().max(f64::MIN_POSITIVE);
    let mut s = *state0;
    let (_, mut g) = potential(l, s.q);
    let mut states = vec![s];
    let mut drift: f64 = 0.0;
    let steps = step_count(dt, t_end);
    for step in 1..=steps {
        let ph = [s.p[0] - 0.5 * dt * g[0], s.p[1] - 0.5 * dt * g[1]];
        s.q = [s.q[0] + dt * ph[0], s.q[1] + dt * ph[1]];
        let (u, g_new) = potential(l, s.q);
        g = g_new;
        s.p = [ph[0] - 0.5 * dt * g[0], ph[1] - 0.5 * dt * g[1]];
        s.t = state0.t + step as f64 * dt;
        if !finite(&s) {
            return Err(Error::NonFinite { time: s.t });
        }
        let h = 0.5 * (s.p[0] * s.p[0] + s.p[1] * s.p[1]) + u;
        drift = drift.max((h - h0).abs() / scale);
        if step % store_every == 0 || step == steps {
            states.push(s);
        }
    }
    Ok(ParticleTrajectory {
        states,
        max_energy_drift: drift,
    })
}

/// Random start at the landscape energy: position uniform in the placement
/// disc restricted to `U(q) < E`, momentum direction uniform.
pub fn random_initial_state(l: &FakirLandscape, seed: u64) -> Result<ParticleState> {
    let mut rng = SeedStream::new(seed);
    let e = l.params.energy;
    for _ in 0..100_000 {
        let (x, y) = rng.in_disc(l.params.placement_radius);
        let u = potential(l, [x, y]).0;
        if u < e {
            let speed = (2.0 * (e - u)).sqrt();
            let theta = std::f64::consts::TAU * rng.uniform();
            return Ok(ParticleState {
                q: [x, y],
                p: [speed * theta.cos(), speed * theta.sin()],
                t: 0.0,
            });
        }
    }
    Err(invalid("energy", "no accessible region found in the placement disc"))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FakirLyapunovParams {
    pub dt: f64,
    pub transient: f64,
    pub t_total: f64,
    pub renorm_every: f64,
}

impl Default for FakirLyapunovParams {
    fn default() -> Self {
        Self {
            dt: 0.01,
            transient: 100.0,
            t_total: 2100.0,
            renorm_every: 1.0,
        }
    }
}

struct TangentRun {
    log_growth: f64,
    measured_time: f64,
}

fn verlet_tangent(
    l: &FakirLandscape,
    state0: &ParticleState,
    tangent0: [f64; 4],
    params: &FakirLyapunovParams,
) -> Result<TangentRun> {
    let dt = params.dt;
    let total = step_count(dt, params.t_total);
    let transient = step_count(dt, params.transient);
    let renorm = ((params.renorm_every / dt).round() as usize).max(1);
    let mut s = *state0;
    let mut v = tangent0;
    let norm0 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm0);
    let (mut g, mut hess) = gradient_hessian(l, s.q);
    let mut log_growth = 0.0;
    let mut measured_steps = 0;
    let mut last = 0;
    for step in 1..=total {
        // state
        let ph = [s.p[0] - 0.5 * dt * g[0], s.p[1] - 0.5 * dt * g[1]];
        // tangent (dq, dp) = (v0, v1, v2, v3)
        let dph = [
            v[2] - 0.5 * dt * (hess[0][0] * v[0] + hess[0][1] * v[1]),
            v[3] - 0.5 * dt * (hess[1][0] * v[0] + hess[1][1] * v[1]),
        ];
        s.q = [s.q[0] + dt * ph[0], s.q[1] + dt * ph[1]];
        v[0] += dt * dph[0];
        v[1] += dt * dph[1];
        (g, hess) = gradient_hessian(l, s.q);
        s.p = [ph[0] - 0.5 * dt * g[0], ph[1] - 0.5 * dt * g[1]];
        v[2] = dph[0] - 0.5 * dt * (hess[0][0] * v[0] + hess[0][1] * v[1]);
        v[3] = dph[1] - 0.5 * dt * (hess[1][0] * v[0] + hess[1][1] * v[1]);

        if step % renorm == 0 || step == total {
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if !norm.is_finite() || !finite(&s) {
                return Err(Error::NonFinite {
                    time: state0.t + step as f64 * dt,
                });
            }
            if last >= transient {
                log_growth += norm.ln();
                measured_steps += step - last;
            }
            v.iter_mut().for_each(|x| *x /= norm);
            last = step;
        }
    }
    Ok(TangentRun {
        log_growth,
        measured_time: measured_steps as f64 * dt,
    })
}

/// Benettin estimate on the 4-D phase-space tangent flow, per unit time.
/// The initial tangent is fixed to `(1, 1, 1, 1) / 2`.
pub fn fakir_lyapunov(l: &FakirLandscape, state0: &ParticleState, params: &FakirLyapunovParams) -> Result<f64> {
    if !(params.t_total > params.transient) || !(params.transient >= 0.0) {
        return Err(invalid("t_total", "must exceed the transient"));
    }
    if !(params.dt > 0.0) {
        return Err(invalid("dt", format!("must be positive, got {}", params.dt)));
    }
    let run = verlet_tangent(l, state0, [1.0; 4], params)?;
    if run.measured_time == 0.0 {
        return Err(invalid("t_total", "no renormalization interval after the transient"));
    }
    Ok(run.log_growth / run.measured_time)
}

/// `log(|δ(t)| / |δ(0)|) / t` from `state0` without transient, for a given
/// initial tangent.
pub fn finite_time_growth(l: &FakirLandscape, state0: &ParticleState, tangent: [f64; 4], dt: f64, t: f64) -> Result<f64> {
    let params = FakirLyapunovParams {
        dt,
        transient: 0.0,
        t_total: t,
        renorm_every: dt,
    };
    let run = verlet_tangent(l, state0, tangent, &params)?;
    Ok(run.log_growth / run.measured_time)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KSummary {
    pub k: usize,
    pub mean: f64,
    pub stderr: f64,
    pub lambdas: Vec<f64>,
    pub landscape_seeds: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeResult {
    pub per_k: Vec<KSummary>,
    /// Mean exponent regressed on `ln k`.
    pub fit: LinearFit,
}

/// Reference value for the slope of the mean exponent against `ln k`.
pub const REFERENCE_SLOPE: f64 = 0.36;

/// Mean exponent over `n_landscapes` landscapes for each `k`, then least
/// squares of the means against `ln k`. Landscape `i` at hill count `k` uses
/// seed `derive_seed(derive_seed(seed, k), i)`; its initial condition uses
/// `derive_seed(landscape_seed, 1)`. Seeds depend on `k` itself, not on its
/// position in `k_list`.
pub fn slope_experiment(
    k_list: &[usize],
    n_landscapes: usize,
    params: &FakirParams,
    lyap: &FakirLyapunovParams,
    seed: u64,
) -> Result<SlopeResult> {
    if k_list.len() < 2 {
        return Err(invalid("k_list", "need at least two hill counts"));
    }
    if k_list.contains(&0) {
        return Err(invalid("k_list", "hill counts must be positive for a log axis"));
    }
    if n_landscapes < 2 {
        return Err(invalid("n_landscapes", "need at least 2"));
    }
    let tasks: Vec<(usize, u64)> = k_list
        .iter()
        .flat_map(|&k| (0..n_landscapes as u64).map(move |i| (k, derive_seed(derive_seed(seed, k as u64), i))))
        .collect();
    let lambdas: Vec<f64> = tasks
        .par_iter()
        .map(|&(k, ls)| {
            let l = sample_landscape(k, params, ls)?;
            let s0 = random_initial_state(&l, derive_seed(ls, 1))?;
            fakir_lyapunov(&l, &s0, lyap)
        })
        .collect::<Result<_>>()?;
    let per_k: Vec<KSummary> = k_list
        .iter()
        .enumerate()
        .map(|(idx, &k)| {
            let range = idx * n_landscapes..(idx + 1) * n_landscapes;
            let stats: RunningStats = lambdas[range.clone()].iter().copied().collect();
            KSummary {
                k,
                mean: stats.mean,
                stderr: stats.stderr(),
                lambdas: lambdas[range.clone()].to_vec(),
                landscape_seeds: tasks[range].iter().map(|t| t.1).collect(),
            }
        })
        .collect();
    let xs: Vec<f64> = per_k.iter().map(|s| (s.k as f64).ln()).collect();
    let ys: Vec<f64> = per_k.iter().map(|s| s.mean).collect();
    let fit = linear_regression(&xs, &ys).ok_or_else(|| invalid("k_list", "need two distinct hill counts"))?;
    Ok(SlopeResult { per_k, fit })
}

impl SlopeResult {
    /// `k,landscape_seed,lambda`
    pub fn to_csv(&self) -> CsvTable {
        let mut t = CsvTable::new(&["k", "landscape_seed", "lambda"]);
        for s in &self.per_k {
            for (seed, l) in s.landscape_seeds.iter().zip(&s.lambdas) {
                t.push(vec![s.k.to_string(), seed.to_string(), fmt_real(*l)]);
            }
        }
        t
    }

    /// `k,lambda_mean,lambda_stderr,n_landscapes`
    pub fn summary_csv(&self) -> CsvTable {
        let mut t = CsvTable::new(&["k", "lambda_mean", "lambda_stderr", "n_landscapes"]);
        for s in &self.per_k {
            t.push(vec![s.k.to_string(), fmt_real(s.mean), fmt_real(s.stderr), s.lambdas.len().to_string()]);
        }
        t
    }

    /// `{"slope": .., "intercept": .., "r2": ..}`
    pub fn regression_json(&self) -> String {
        format!(
            "{{\"slope\": {}, \"intercept\": {}, \"r2\": {}}}\n",
            fmt_real(self.fit.slope),
            fmt_real(self.fit.intercept),
            fmt_real(self.fit.r2)
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub q: Vec2,
    /// Negative Hessian eigenvalues (0 minimum, 1 saddle, 2 maximum).
    pub unstable_dims: usize,
}

fn sym_eigenvalues(h: &Mat2) -> (f64, f64) {
    let tr = h[0][0] + h[1][1];
    let diff = h[0][0] - h[1][1];
    let disc = (0.25 * diff * diff + h[0][1] * h[1][0]).max(0.0).sqrt();
    (0.5 * tr - disc, 0.5 * tr + disc)
}

/// Critical points of `U` inside the wall radius, found by damped Newton
/// from every hill center and `n_starts` random points.
pub fn critical_points(l: &FakirLandscape, n_starts: usize, seed: u64) -> Vec<CriticalPoint> {
    let p = &l.params;
    let curvature = p.amplitude / (p.width * p.width);
    let gtol = 1e-10 * curvature;
    let mut rng = SeedStream::new(seed);
    let mut starts: Vec<Vec2> = l.centers.clone();
    for _ in 0..n_starts {
        let (x, y) = rng.in_disc(p.confinement_radius);
        starts.push([x, y]);
    }
    let gnorm = |g: Vec2| g[0].hypot(g[1]);
    let mut found: Vec<CriticalPoint> = Vec::new();
    for start in starts {
        let mut q = start;
        let mut converged = false;
        for _ in 0..100 {
            let (g, h) = gradient_hessian(l, q);
            let gn = gnorm(g);
            if gn <= gtol {
                converged = true;
                break;
            }
            let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
            if det == 0.0 || !det.is_finite() {
                break;
            }
            let step = [
                -(h[1][1] * g[0] - h[0][1] * g[1]) / det,
                -(h[0][0] * g[1] - h[1][0] * g[0]) / det,
            ];
            let mut alpha = 1.0;
            let mut moved = false;
            for _ in 0..30 {
                let trial = [q[0] + alpha * step[0], q[1] + alpha * step[1]];
                if gnorm(gradient_hessian(l, trial).0) < gn {
                    q = trial;
                    moved = true;
                    break;
                }
                alpha *= 0.5;
            }
            if !moved || q[0].hypot(q[1]) > p.confinement_radius {
                break;
            }
        }
        if !converged || q[0].hypot(q[1]) > p.confinement_radius {
            continue;
        }
        if found.iter().any(|c| (c.q[0] - q[0]).hypot(c.q[1] - q[1]) < 1e-6) {
            continue;
        }
        let (_, h) = gradient_hessian(l, q);
        let (lo, hi) = sym_eigenvalues(&h);
        // eigenvalues within 1e-9 of the hill curvature count as flat
        let eps = 1e-9 * curvature;
        let unstable_dims = [lo, hi].iter().filter(|e| **e < -eps).count();
        found.push(CriticalPoint { q, unstable_dims });
    }
    found
}

/// Critical points with at least one unstable direction.
pub fn count_critical_points(l: &FakirLandscape, n_starts: usize, seed: u64) -> usize {
    critical_points(l, n_starts, seed)
        .iter()
        .filter(|c| c.unstable_dims > 0)
        .count()
}
