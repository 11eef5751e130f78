//! Maximal Lyapunov exponents.
//!
//! The primary estimator co-integrates the state with one tangent vector and
//! renormalizes it at fixed intervals (Benettin). The susceptibility route
//! propagates the whole fundamental matrix `M(t0 + τ, t0)` and reports
//! `Ψ²(τ) = ‖M‖_F² / n`, whose growth rate is twice the Benettin rate: the
//! Frobenius norm is squared. Estimates carry a [`Convention`] tag and
//! convert with [`LyapunovEstimate::to_convention`].

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::io::{fmt_real, CsvTable};
use crate::netmodel::SigmoidSpec;
use crate::ode::{step_count, Rk4};
use crate::randmat::ConnectivityMatrix;
use crate::rng::{derive_seed, SeedStream};
use crate::stats::{linear_regression, RunningStats};

/// A flow together with its variational equation. The block `y` passed to
/// [`VariationalField::rhs`] holds the state in column 0 and tangent vectors
/// in the remaining columns.
pub trait VariationalField: Sync {
    fn dim(&self) -> usize;

    fn rhs(&self, y: &DMatrix<f64>, out: &mut DMatrix<f64>, scratch: &mut DMatrix<f64>);
}

/// `dx/dt = -x + J S(x)`, `dv/dt = -v + J (S'(x) ∘ v)`.
pub struct NetworkFlow<'a> {
    j: &'a ConnectivityMatrix,
    s: &'a SigmoidSpec,
}

impl<'a> NetworkFlow<'a> {
    pub fn new(j: &'a ConnectivityMatrix, s: &'a SigmoidSpec) -> Self {
        Self { j, s }
    }
}

impl VariationalField for NetworkFlow<'_> {
    fn dim(&self) -> usize {
        self.j.n()
    }

    fn rhs(&self, y: &DMatrix<f64>, out: &mut DMatrix<f64>, scratch: &mut DMatrix<f64>) {
        let n = y.nrows();
        let cols = y.ncols();
        let ys = y.as_slice();
        let bs = scratch.as_mut_slice();
        let (state, tangents) = ys.split_at(n);
        let (b_state, b_tangents) = bs.split_at_mut(n);
        for i in 0..n {
            b_state[i] = self.s.value(state[i]);
        }
        if cols > 1 {
            let gains: Vec<f64> = state.iter().map(|x| self.s.deriv(*x)).collect();
            for (bc, yc) in b_tangents.chunks_exact_mut(n).zip(tangents.chunks_exact(n)) {
                for i in 0..n {
                    bc[i] = gains[i] * yc[i];
                }
            }
        }
        out.copy_from(y);
        if cols <= 4 {
            thin_gemm_sub(self.j.entries(), scratch, out);
        } else {
            out.gemm(1.0, self.j.entries(), scratch, -1.0);
        }
    }
}

/// `out = J b - out` for a thin `b`, streaming `J` once column by column
/// (the blocked product repacks all of `J` on every call).
fn thin_gemm_sub(j: &DMatrix<f64>, b: &DMatrix<f64>, out: &mut DMatrix<f64>) {
    let n = j.nrows();
    let cols = b.ncols();
    for v in out.as_mut_slice() {
        *v = -*v;
    }
    let bs = b.as_slice();
    let os = out.as_mut_slice();
    for (k, jcol) in j.as_slice().chunks_exact(n).enumerate() {
        for c in 0..cols {
            let w = bs[c * n + k];
            if w != 0.0 {
                for (o, a) in os[c * n..(c + 1) * n].iter_mut().zip(jcol) {
                    *o += a * w;
                }
            }
        }
    }
}

/// `dx/dt = A x` with the same matrix acting on tangents.
pub struct LinearFlow {
    pub a: DMatrix<f64>,
}

impl VariationalField for LinearFlow {
    fn dim(&self) -> usize {
        self.a.nrows()
    }

    fn rhs(&self, y: &DMatrix<f64>, out: &mut DMatrix<f64>, _scratch: &mut DMatrix<f64>) {
        out.gemm(1.0, &self.a, y, 0.0);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenettinParams {
    pub dt: f64,
    pub transient: f64,
    pub t_total: f64,
    pub renorm_every: f64,
}

impl Default for BenettinParams {
    fn default() -> Self {
        Self {
            dt: 0.01,
            transient: 200.0,
            t_total: 2000.0,
            renorm_every: 1.0,
        }
    }
}

impl BenettinParams {
    fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(invalid("dt", format!("must be positive, got {}", self.dt)));
        }
        if !(self.transient > 0.0) {
            return Err(invalid("transient", format!("must be positive, got {}", self.transient)));
        }
        if !(self.t_total > self.transient) || !self.t_total.is_finite() {
            return Err(invalid(
                "t_total",
                format!("must exceed the transient {}, got {}", self.transient, self.t_total),
            ));
        }
        if !(self.renorm_every >= self.dt) {
            return Err(invalid("renorm_every", "must be at least one step"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// Growth rate of `|δx|` per unit time.
    Benettin,
    /// Growth rate of `Ψ²`, i.e. of `|δx|²`.
    Susceptibility,
}

impl Convention {
    pub fn as_str(self) -> &'static str {
        match self {
            Convention::Benettin => "benettin",
            Convention::Susceptibility => "susceptibility",
        }
    }

    fn factor(self) -> f64 {
        match self {
            Convention::Benettin => 1.0,
            Convention::Susceptibility => 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LyapunovEstimate {
    pub lambda: f64,
    /// Batch-means standard error for a single run, or the standard error
    /// over realizations for ensemble values.
    pub stderr: f64,
    pub n: usize,
    pub sigma: f64,
    pub params: BenettinParams,
    pub convention: Convention,
}

impl LyapunovEstimate {
    pub fn to_convention(&self, convention: Convention) -> Self {
        let scale = convention.factor() / self.convention.factor();
        Self {
            lambda: self.lambda * scale,
            stderr: self.stderr * scale,
            convention,
            ..self.clone()
        }
    }
}

/// Raw output of a Benettin run.
#[derive(Debug, Clone, PartialEq)]
pub struct BenettinRun {
    pub lambda: f64,
    pub stderr: f64,
    /// `log` growth factor of each renormalization interval after the
    /// transient.
    pub log_growth: Vec<f64>,
    pub interval: f64,
    pub final_state: DVector<f64>,
}

const BATCHES: usize = 10;

fn unit_random(n: usize, seed: u64) -> DVector<f64> {
    let mut rng = SeedStream::new(seed);
    let v = DVector::from_fn(n, |_, _| rng.standard_normal());
    let norm = v.norm();
    v / norm
}

/// Benettin estimate for any [`VariationalField`]. The initial tangent is a
/// random unit vector drawn from `tangent_seed`.
pub fn benettin<F: VariationalField>(
    field: &F,
    x0: &DVector<f64>,
    params: &BenettinParams,
    tangent_seed: u64,
) -> Result<BenettinRun> {
    params.validate()?;
    let n = field.dim();
    if x0.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: x0.len(),
        });
    }
    let total_steps = step_count(params.dt, params.t_total);
    let transient_steps = step_count(params.dt, params.transient);
    let renorm_steps = ((params.renorm_every / params.dt).round() as usize).max(1);

    let mut y = DMatrix::zeros(n, 2);
    y.column_mut(0).copy_from(x0);
    y.column_mut(1).copy_from(&unit_random(n, tangent_seed));
    let mut rk = Rk4::new(n, 2);
    let mut scratch = DMatrix::zeros(n, 2);
    let mut log_growth = Vec::new();
    let mut last_renorm = 0;

    for step in 1..=total_steps {
        rk.step(&mut y, params.dt, |y, out| field.rhs(y, out, &mut scratch));
        if step % renorm_steps == 0 || step == total_steps {
            let norm = y.column(1).norm();
            let time = step as f64 * params.dt;
            if !norm.is_finite() || !y.column(0).iter().all(|v| v.is_finite()) {
                return Err(Error::NonFinite { time });
            }
            if norm == 0.0 {
                return Err(invalid("tangent", format!("collapsed to zero at t = {time}")));
            }
            if last_renorm >= transient_steps {
                log_growth.push(norm.ln());
            }
            y.column_mut(1).scale_mut(1.0 / norm);
            last_renorm = step;
        }
    }
    if log_growth.is_empty() {
        return Err(invalid("t_total", "no renormalization interval after the transient"));
    }
    let interval = renorm_steps as f64 * params.dt;
    let accumulated_time = (total_steps - transient_steps.div_ceil(renorm_steps) * renorm_steps) as f64 * params.dt;
    let lambda = log_growth.iter().sum::<f64>() / accumulated_time;

    let per_batch = log_growth.len() / BATCHES;
    let stderr = if per_batch == 0 {
        0.0
    } else {
        let batches: RunningStats = log_growth
            .chunks_exact(per_batch)
            .take(BATCHES)
            .map(|c| c.iter().sum::<f64>() / (c.len() as f64 * interval))
            .collect();
        batches.stderr()
    };
    Ok(BenettinRun {
        lambda,
        stderr,
        log_growth,
        interval,
        final_state: y.column(0).into_owned(),
    })
}

/// Benettin estimate of the network's maximal exponent from `x0`.
pub fn max_lyapunov_benettin(
    j: &ConnectivityMatrix,
    s: &SigmoidSpec,
    x0: &DVector<f64>,
    params: &BenettinParams,
    seed: u64,
) -> Result<LyapunovEstimate> {
    let run = benettin(&NetworkFlow::new(j, s), x0, params, seed)?;
    Ok(LyapunovEstimate {
        lambda: run.lambda,
        stderr: run.stderr,
        n: j.n(),
        sigma: j.sigma(),
        params: *params,
        convention: Convention::Benettin,
    })
}

/// Largest dimension accepted by [`susceptibility_trace`].
pub const MAX_SUSCEPTIBILITY_DIM: usize = 300;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SusceptibilityParams {
    pub dt: f64,
    /// Transient before the fundamental matrix is reset to the identity.
    pub t0: f64,
    pub tau_max: f64,
    /// Spacing of the recorded τ grid.
    pub record_every: f64,
}

/// `Ψ²(τ) = ‖M(t0 + τ, t0)‖_F² / n` on a τ grid starting at 0.
pub fn susceptibility_trace(
    j: &ConnectivityMatrix,
    s: &SigmoidSpec,
    x0: &DVector<f64>,
    params: &SusceptibilityParams,
) -> Result<Vec<(f64, f64)>> {
    let n = j.n();
    if n > MAX_SUSCEPTIBILITY_DIM {
        return Err(invalid("n", format!("fundamental-matrix propagation capped at {MAX_SUSCEPTIBILITY_DIM}, got {n}")));
    }
    if x0.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x0.len() });
    }
    if !(params.dt > 0.0) || !(params.tau_max > 0.0) || !(params.t0 >= 0.0) {
        return Err(invalid("dt", "dt and tau_max must be positive, t0 non-negative"));
    }
    let flow = NetworkFlow::new(j, s);

    let mut state = DMatrix::from_column_slice(n, 1, x0.as_slice());
    let mut rk1 = Rk4::new(n, 1);
    let mut scratch1 = DMatrix::zeros(n, 1);
    for step in 1..=step_count(params.dt, params.t0) {
        rk1.step(&mut state, params.dt, |y, out| flow.rhs(y, out, &mut scratch1));
        if step % 100 == 0 && !state.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite { time: step as f64 * params.dt });
        }
    }

    let mut y = DMatrix::zeros(n, n + 1);
    y.column_mut(0).copy_from(&state.column(0));
    for k in 0..n {
        y[(k, k + 1)] = 1.0;
    }
    let mut rk = Rk4::new(n, n + 1);
    let mut scratch = DMatrix::zeros(n, n + 1);
    let record_steps = ((params.record_every / params.dt).round() as usize).max(1);
    let psi2 = |y: &DMatrix<f64>| y.as_slice()[n..].iter().map(|v| v * v).sum::<f64>() / n as f64;
    let mut trace = vec![(0.0, psi2(&y))];
    for step in 1..=step_count(params.dt, params.tau_max) {
        rk.step(&mut y, params.dt, |y, out| flow.rhs(y, out, &mut scratch));
        if step % record_steps == 0 {
            let tau = step as f64 * params.dt;
            let value = psi2(&y);
            if !value.is_finite() || value > 1e300 {
                return Err(Error::Overflow { tau });
            }
            trace.push((tau, value));
        }
    }
    Ok(trace)
}

/// Slope of `log Ψ²(τ)` over the last half of the trace, in the
/// susceptibility convention.
pub fn susceptibility_rate(trace: &[(f64, f64)]) -> Option<f64> {
    let tau_max = trace.last()?.0;
    let (xs, ys): (Vec<f64>, Vec<f64>) = trace
        .iter()
        .filter(|(tau, _)| *tau >= 0.5 * tau_max)
        .map(|(tau, v)| (*tau, v.ln()))
        .unzip();
    linear_regression(&xs, &ys).map(|f| f.slope)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveParams {
    pub benettin: BenettinParams,
    pub sigmoid: SigmoidSpec,
}

impl Default for CurveParams {
    fn default() -> Self {
        Self {
            benettin: BenettinParams::default(),
            sigmoid: SigmoidSpec::tanh(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub sigma: f64,
    pub n: usize,
    /// Benettin convention.
    pub mean: f64,
    pub stderr: f64,
    pub lambdas: Vec<f64>,
    /// Matrix seed of each realization.
    pub seeds: Vec<u64>,
}

/// Ensemble-mean exponent for each `sigma`. Task `i * n_realizations + r`
/// samples `J` with `derive_seed(seed, task)`; the initial condition
/// (uniform in `[-1, 1]^n`) and the tangent come from
/// `derive_seed(matrix_seed, 1)` and `derive_seed(matrix_seed, 2)`.
pub fn lyapunov_curve(
    sigma_list: &[f64],
    n: usize,
    n_realizations: usize,
    params: &CurveParams,
    seed: u64,
) -> Result<Vec<CurvePoint>> {
    if sigma_list.is_empty() {
        return Err(invalid("sigma_list", "must not be empty"));
    }
    if n_realizations == 0 {
        return Err(invalid("n_realizations", "must be at least 1"));
    }
    params.benettin.validate()?;
    let tasks: Vec<(usize, u64)> = (0..sigma_list.len() * n_realizations)
        .map(|t| (t / n_realizations, derive_seed(seed, t as u64)))
        .collect();
    let lambdas: Vec<f64> = tasks
        .par_iter()
        .map(|&(si, matrix_seed)| {
            let j = ConnectivityMatrix::sample(n, sigma_list[si], matrix_seed)?;
            let mut rng = SeedStream::new(derive_seed(matrix_seed, 1));
            let x0 = DVector::from_fn(n, |_, _| rng.uniform_in(-1.0, 1.0));
            let est = max_lyapunov_benettin(&j, &params.sigmoid, &x0, &params.benettin, derive_seed(matrix_seed, 2))?;
            Ok(est.lambda)
        })
        .collect::<Result<_>>()?;
    Ok(sigma_list
        .iter()
        .enumerate()
        .map(|(si, &sigma)| {
            let range = si * n_realizations..(si + 1) * n_realizations;
            let stats: RunningStats = lambdas[range.clone()].iter().copied().collect();
            CurvePoint {
                sigma,
                n,
                mean: stats.mean,
                stderr: stats.stderr(),
                lambdas: lambdas[range.clone()].to_vec(),
                seeds: tasks[range].iter().map(|t| t.1).collect(),
            }
        })
        .collect())
}

/// `sigma,n,realization,lambda,convention`, one row per realization and
/// convention.
pub fn curve_to_csv(points: &[CurvePoint]) -> CsvTable {
    let mut t = CsvTable::new(&["sigma", "n", "realization", "lambda", "convention"]);
    for p in points {
        for (r, l) in p.lambdas.iter().enumerate() {
            for c in [Convention::Benettin, Convention::Susceptibility] {
                t.push(vec![
                    fmt_real(p.sigma),
                    p.n.to_string(),
                    r.to_string(),
                    fmt_real(l * c.factor()),
                    c.as_str().to_string(),
                ]);
            }
        }
    }
    t
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub prefactor: f64,
    pub r2: f64,
}

/// Least squares of `log v` on `log u`.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<PowerLawFit> {
    if points.len() < 3 {
        return Err(invalid("points", format!("need at least 3, got {}", points.len())));
    }
    if let Some(p) = points.iter().find(|(u, v)| !(*u > 0.0 && *v > 0.0)) {
        return Err(invalid("points", format!("coordinates must be positive, got {p:?}")));
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = points.iter().map(|(u, v)| (u.ln(), v.ln())).unzip();
    let fit = linear_regression(&xs, &ys).ok_or_else(|| invalid("points", "need two distinct u"))?;
    Ok(PowerLawFit {
        exponent: fit.slope,
        prefactor: fit.intercept.exp(),
        r2: fit.r2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn short() -> BenettinParams {
        BenettinParams {
            dt: 0.01,
            transient: 10.0,
            t_total: 60.0,
            renorm_every: 1.0,
        }
    }

    #[test]
    fn network_flow_matches_field_and_jacobian() {
        use crate::netmodel::{jacobian_at, vector_field};
        let j = ConnectivityMatrix::sample(30, 1.7, 4).unwrap();
        let s = SigmoidSpec::tanh();
        let flow = NetworkFlow::new(&j, &s);
        let mut rng = SeedStream::new(5);
        // 3 columns take the streaming kernel, 7 the blocked product
        for cols in [1, 3, 7] {
            let y = DMatrix::from_fn(30, cols, |_, _| rng.standard_normal());
            let mut out = DMatrix::zeros(30, cols);
            let mut scratch = DMatrix::zeros(30, cols);
            flow.rhs(&y, &mut out, &mut scratch);
            let x = y.column(0).into_owned();
            assert!((out.column(0) - vector_field(&j, &s, &x).unwrap()).amax() < 1e-12);
            let jac = jacobian_at(&j, &s, &x).unwrap();
            for c in 1..cols {
                assert!((out.column(c) - &jac * y.column(c)).amax() < 1e-12);
            }
        }
    }

    #[test]
    fn linear_diagonal_field() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![-1.0, -2.0]));
        let run = benettin(&LinearFlow { a }, &DVector::from_vec(vec![1.0, 1.0]), &short(), 3).unwrap();
        assert!((run.lambda + 1.0).abs() < 1e-3, "{}", run.lambda);
    }

    #[test]
    fn linear_fields_recover_top_real_part() {
        let mut rng = SeedStream::new(11);
        for n in 2..=10 {
            // A = P D P^{-1} with a known spectrum, top real part -0.3
            let diag: Vec<f64> = (0..n).map(|k| -0.3 - 0.4 * k as f64).collect();
            let p = DMatrix::from_fn(n, n, |i, k| if i == k { 2.0 } else { 0.0 } + rng.uniform_in(-0.5, 0.5));
            let a = &p * DMatrix::from_diagonal(&DVector::from_vec(diag)) * p.clone().try_inverse().unwrap();
            let params = BenettinParams {
                dt: 0.01,
                transient: 20.0,
                t_total: 220.0,
                renorm_every: 1.0,
            };
            let run = benettin(&LinearFlow { a }, &DVector::from_element(n, 1.0), &params, n as u64).unwrap();
            assert!((run.lambda + 0.3).abs() < 1e-3, "n = {n}: {}", run.lambda);
        }
    }

    #[test]
    fn parameter_validation() {
        let a = LinearFlow { a: DMatrix::identity(2, 2) };
        let x = DVector::zeros(2);
        let mut p = short();
        p.transient = p.t_total;
        assert!(benettin(&a, &x, &p, 1).is_err());
        let mut p = short();
        p.dt = 0.0;
        assert!(benettin(&a, &x, &p, 1).is_err());
        assert!(benettin(&a, &DVector::zeros(3), &short(), 1).is_err());
    }

    #[test]
    fn conventions_convert_by_two() {
        let e = LyapunovEstimate {
            lambda: 0.1,
            stderr: 0.01,
            n: 3,
            sigma: 1.5,
            params: short(),
            convention: Convention::Benettin,
        };
        let s = e.to_convention(Convention::Susceptibility);
        assert_eq!(s.lambda, 0.2);
        assert_eq!(s.stderr, 0.02);
        assert_eq!(s.to_convention(Convention::Benettin), e);
    }

    #[test]
    fn subcritical_network_exponent() {
        let j = ConnectivityMatrix::sample(200, 0.5, 31).unwrap();
        let mut rng = SeedStream::new(1);
        let x0 = DVector::from_fn(200, |_, _| rng.uniform_in(-1.0, 1.0));
        let params = BenettinParams {
            dt: 0.05,
            transient: 50.0,
            t_total: 250.0,
            renorm_every: 1.0,
        };
        let est = max_lyapunov_benettin(&j, &SigmoidSpec::tanh(), &x0, &params, 2).unwrap();
        assert!((est.lambda + 0.5).abs() < 0.05, "{}", est.lambda);
    }

    #[test]
    fn susceptibility_identity_and_leak() {
        let j0 = ConnectivityMatrix::from_entries(DMatrix::zeros(5, 5), 1.0).unwrap();
        let params = SusceptibilityParams {
            dt: 0.01,
            t0: 0.0,
            tau_max: 2.0,
            record_every: 0.5,
        };
        let trace = susceptibility_trace(&j0, &SigmoidSpec::tanh(), &DVector::from_element(5, 0.3), &params).unwrap();
        assert_eq!(trace[0], (0.0, 1.0));
        assert_eq!(trace.len(), 5);
        for (tau, v) in &trace {
            assert!((v - (-2.0 * tau).exp()).abs() < 1e-9);
        }
        let rate = susceptibility_rate(&trace).unwrap();
        assert!((rate + 2.0).abs() < 1e-8);
    }

    #[test]
    fn susceptibility_rejects_large_networks() {
        let j = ConnectivityMatrix::sample(301, 1.0, 1).unwrap();
        let params = SusceptibilityParams {
            dt: 0.01,
            t0: 0.0,
            tau_max: 1.0,
            record_every: 0.1,
        };
        assert!(susceptibility_trace(&j, &SigmoidSpec::tanh(), &DVector::zeros(301), &params).is_err());
    }

    #[test]
    fn susceptibility_overflow_is_reported() {
        let a = DMatrix::from_diagonal_element(3, 3, 400.0);
        let j = ConnectivityMatrix::from_entries(a, 1.0).unwrap();
        let params = SusceptibilityParams {
            dt: 0.001,
            t0: 0.0,
            tau_max: 10.0,
            record_every: 0.01,
        };
        let err = susceptibility_trace(&j, &SigmoidSpec::tanh(), &DVector::zeros(3), &params).unwrap_err();
        assert!(matches!(err, Error::Overflow { tau } if tau > 0.5 && tau < 10.0));
    }

    #[test]
    fn power_law_fits() {
        let sq: Vec<(f64, f64)> = [0.1, 0.2, 0.5, 1.0, 3.0].iter().map(|u| (*u, u * u)).collect();
        let f = fit_power_law(&sq).unwrap();
        assert!((f.exponent - 2.0).abs() < 1e-12 && (f.r2 - 1.0).abs() < 1e-12);
        let lin: Vec<(f64, f64)> = [1.0, 2.0, 4.0].iter().map(|u| (*u, 3.0 * u)).collect();
        let f = fit_power_law(&lin).unwrap();
        assert!((f.exponent - 1.0).abs() < 1e-12 && (f.prefactor - 3.0).abs() < 1e-12);

        let mut rng = SeedStream::new(4);
        let noisy: Vec<(f64, f64)> = (1..=20)
            .map(|k| {
                let u = k as f64 * 0.1;
                (u, u * u * (1.0 + 0.05 * rng.uniform_in(-1.0, 1.0)))
            })
            .collect();
        let f = fit_power_law(&noisy).unwrap();
        assert!((1.8..=2.2).contains(&f.exponent));

        assert!(fit_power_law(&sq[..2]).is_err());
        assert!(fit_power_law(&[(1.0, 1.0), (2.0, -1.0), (3.0, 1.0)]).is_err());
    }

    #[test]
    fn curve_is_deterministic_and_csv_shaped() {
        let params = CurveParams {
            benettin: BenettinParams {
                dt: 0.05,
                transient: 5.0,
                t_total: 15.0,
                renorm_every: 1.0,
            },
            ..Default::default()
        };
        let a = lyapunov_curve(&[0.5, 1.5], 20, 3, &params, 9).unwrap();
        let b = lyapunov_curve(&[0.5, 1.5], 20, 3, &params, 9).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 2);
        assert_eq!(a[0].lambdas.len(), 3);
        let csv = curve_to_csv(&a).render();
        assert!(csv.starts_with("sigma,n,realization,lambda,convention\n"));
        assert_eq!(csv.lines().count(), 1 + 2 * 3 * 2);
        assert!(lyapunov_curve(&[], 20, 3, &params, 9).is_err());
    }
}
