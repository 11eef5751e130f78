//! The rate network `dx/dt = -x + J S(x)`: nonlinearities, vector field,
//! Jacobian and RK4 trajectories.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::ode::{step_count, Rk4};
use crate::randmat::ConnectivityMatrix;

/// Odd sigmoids with unit slope at the origin, bounded by 1, with a
/// derivative that is even and non-increasing on `x >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseSigmoid {
    #[default]
    Tanh,
    /// `x / sqrt(1 + x^2)`
    Algebraic,
}

impl BaseSigmoid {
    pub fn value(self, x: f64) -> f64 {
        match self {
            BaseSigmoid::Tanh => x.tanh(),
            BaseSigmoid::Algebraic => x / (1.0 + x * x).sqrt(),
        }
    }

    pub fn deriv(self, x: f64) -> f64 {
        match self {
            BaseSigmoid::Tanh => {
                let t = x.tanh();
                1.0 - t * t
            }
            BaseSigmoid::Algebraic => (1.0 + x * x).powf(-1.5),
        }
    }

    /// `sup |S|`.
    pub fn saturation(self) -> f64 {
        1.0
    }
}

/// Sigmoid that is exactly linear with slope `1/sigma` on `|x| < rho`,
/// equal to the base sigmoid on `|x| > rho + eta`, and joined in between by
/// a cubic Hermite segment matching value and slope at both ends.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModifiedSigmoid {
    pub base: BaseSigmoid,
    pub sigma: f64,
    pub rho: f64,
    pub eta: f64,
    // Hermite end data on [rho, rho + eta]
    y0: f64,
    m0: f64,
    y1: f64,
    m1: f64,
}

impl ModifiedSigmoid {
    pub fn new(base: BaseSigmoid, sigma: f64, rho: f64, eta: f64) -> Result<Self> {
        if !(sigma > 1.0) || !sigma.is_finite() {
            return Err(invalid("sigma", format!("must exceed 1, got {sigma}")));
        }
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(invalid("rho", format!("must be positive, got {rho}")));
        }
        if !(eta > 0.0) || !eta.is_finite() {
            return Err(invalid("eta", format!("must be positive, got {eta}")));
        }
        let x1 = rho + eta;
        Ok(Self {
            base,
            sigma,
            rho,
            eta,
            y0: rho / sigma,
            m0: 1.0 / sigma,
            y1: base.value(x1),
            m1: base.deriv(x1),
        })
    }

    fn blend_value(&self, x: f64) -> f64 {
        let s = (x - self.rho) / self.eta;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.y0 + h10 * self.eta * self.m0 + h01 * self.y1 + h11 * self.eta * self.m1
    }

    fn blend_deriv(&self, x: f64) -> f64 {
        let s = (x - self.rho) / self.eta;
        let s2 = s * s;
        let d00 = 6.0 * s2 - 6.0 * s;
        let d10 = 3.0 * s2 - 4.0 * s + 1.0;
        let d01 = -6.0 * s2 + 6.0 * s;
        let d11 = 3.0 * s2 - 2.0 * s;
        (d00 * self.y0 + d01 * self.y1) / self.eta + d10 * self.m0 + d11 * self.m1
    }

    pub fn value(&self, x: f64) -> f64 {
        let a = x.abs();
        let v = if a < self.rho {
            a / self.sigma
        } else if a > self.rho + self.eta {
            self.base.value(a)
        } else {
            self.blend_value(a)
        };
        v.copysign(x)
    }

    pub fn deriv(&self, x: f64) -> f64 {
        let a = x.abs();
        if a < self.rho {
            1.0 / self.sigma
        } else if a > self.rho + self.eta {
            self.base.deriv(a)
        } else {
            self.blend_deriv(a)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmoidSpec {
    Base(BaseSigmoid),
    Modified(ModifiedSigmoid),
}

impl Default for SigmoidSpec {
    fn default() -> Self {
        SigmoidSpec::Base(BaseSigmoid::Tanh)
    }
}

impl SigmoidSpec {
    pub fn tanh() -> Self {
        Self::default()
    }

    pub fn value(&self, x: f64) -> f64 {
        match self {
            SigmoidSpec::Base(b) => b.value(x),
            SigmoidSpec::Modified(m) => m.value(x),
        }
    }

    pub fn deriv(&self, x: f64) -> f64 {
        match self {
            SigmoidSpec::Base(b) => b.deriv(x),
            SigmoidSpec::Modified(m) => m.deriv(x),
        }
    }

    pub fn slope_at_origin(&self) -> f64 {
        match self {
            SigmoidSpec::Base(_) => 1.0,
            SigmoidSpec::Modified(m) => 1.0 / m.sigma,
        }
    }

    pub fn saturation(&self) -> f64 {
        match self {
            SigmoidSpec::Base(b) => b.saturation(),
            SigmoidSpec::Modified(m) => m.base.saturation(),
        }
    }

    pub fn base(&self) -> BaseSigmoid {
        match self {
            SigmoidSpec::Base(b) => *b,
            SigmoidSpec::Modified(m) => m.base,
        }
    }
}

pub fn sigmoid_eval(s: &SigmoidSpec, x: f64) -> f64 {
    s.value(x)
}

pub fn sigmoid_deriv(s: &SigmoidSpec, x: f64) -> f64 {
    s.deriv(x)
}

fn check_dim(j: &ConnectivityMatrix, len: usize) -> Result<()> {
    if j.n() != len {
        return Err(Error::DimensionMismatch {
            expected: j.n(),
            got: len,
        });
    }
    Ok(())
}

/// `-x + J S(x)`.
pub fn vector_field(j: &ConnectivityMatrix, s: &SigmoidSpec, x: &DVector<f64>) -> Result<DVector<f64>> {
    check_dim(j, x.len())?;
    let sx = x.map(|v| s.value(v));
    let mut out = -x;
    out.gemv(1.0, j.entries(), &sx, 1.0);
    Ok(out)
}

/// `-I + J diag(S'(x))`: column `k` of `J` scaled by `S'(x_k)`.
pub fn jacobian_at(j: &ConnectivityMatrix, s: &SigmoidSpec, x: &DVector<f64>) -> Result<DMatrix<f64>> {
    check_dim(j, x.len())?;
    let mut m = j.entries().clone();
    for (k, mut col) in m.column_iter_mut().enumerate() {
        col *= s.deriv(x[k]);
    }
    for k in 0..x.len() {
        m[(k, k)] -= 1.0;
    }
    Ok(m)
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkState {
    pub x: DVector<f64>,
    pub t: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DVector<f64>>,
    pub dt: f64,
    pub method: &'static str,
}

impl Trajectory {
    pub fn final_state(&self) -> NetworkState {
        NetworkState {
            x: self.states.last().cloned().unwrap_or_default(),
            t: self.times.last().copied().unwrap_or(0.0),
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrateOptions {
    pub dt: f64,
    pub t_end: f64,
    /// Store every k-th step. `None` stores every step up to `t_end = 100`
    /// and about 10^4 samples beyond.
    pub store_every: Option<usize>,
}

impl IntegrateOptions {
    pub fn new(dt: f64, t_end: f64) -> Self {
        Self {
            dt,
            t_end,
            store_every: None,
        }
    }
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        Self::new(0.01, 100.0)
    }
}

/// Fixed-step RK4 solution from `x0`. The initial and final states are
/// always stored.
pub fn integrate(
    j: &ConnectivityMatrix,
    s: &SigmoidSpec,
    x0: &DVector<f64>,
    opts: &IntegrateOptions,
) -> Result<Trajectory> {
    check_dim(j, x0.len())?;
    if !(opts.dt > 0.0) || !opts.dt.is_finite() {
        return Err(invalid("dt", format!("must be positive, got {}", opts.dt)));
    }
    if !(opts.t_end > 0.0) || !opts.t_end.is_finite() {
        return Err(invalid("t_end", format!("must be positive, got {}", opts.t_end)));
    }
    let n = x0.len();
    let steps = step_count(opts.dt, opts.t_end);
    let store_every = opts.store_every.unwrap_or_else(|| {
        if opts.t_end <= 100.0 {
            1
        } else {
            (steps / 10_000).max(1)
        }
    });
    if store_every == 0 {
        return Err(invalid("store_every", "must be at least 1"));
    }

    let mut y = DMatrix::from_column_slice(n, 1, x0.as_slice());
    let mut rk = Rk4::new(n, 1);
    let mut sx = DVector::zeros(n);
    let mut times = vec![0.0];
    let mut states = vec![x0.clone()];

    for step in 1..=steps {
        rk.step(&mut y, opts.dt, |y, out| {
            for (d, v) in sx.iter_mut().zip(y.iter()) {
                *d = s.value(*v);
            }
            out.copy_from(y);
            out.column_mut(0).gemv(1.0, j.entries(), &sx, -1.0);
        });
        let t = step as f64 * opts.dt;
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { time: t });
        }
        if step % store_every == 0 || step == steps {
            times.push(t);
            states.push(DVector::from_column_slice(y.as_slice()));
        }
    }
    Ok(Trajectory {
        times,
        states,
        dt: opts.dt,
        method: "rk4",
    })
}
