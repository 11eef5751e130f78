//! Fixed-step classical Runge–Kutta on dense state blocks.

use nalgebra::DMatrix;

/// Scratch space for [`Rk4::step`]; reused across steps to avoid allocation.
pub struct Rk4 {
    k1: DMatrix<f64>,
    k2: DMatrix<f64>,
    k3: DMatrix<f64>,
    k4: DMatrix<f64>,
    tmp: DMatrix<f64>,
}

impl Rk4 {
    pub fn new(rows: usize, cols: usize) -> Self {
        let z = DMatrix::zeros(rows, cols);
        Self {
            k1: z.clone(),
            k2: z.clone(),
            k3: z.clone(),
            k4: z.clone(),
            tmp: z,
        }
    }

    /// Advance `y` by one step of size `dt` under `rhs(y, out)`.
    pub fn step<F>(&mut self, y: &mut DMatrix<f64>, dt: f64, mut rhs: F)
    where
        F: FnMut(&DMatrix<f64>, &mut DMatrix<f64>),
    {
        rhs(y, &mut self.k1);

        combine(&mut self.tmp, y, 0.5 * dt, &self.k1);
        rhs(&self.tmp, &mut self.k2);

        combine(&mut self.tmp, y, 0.5 * dt, &self.k2);
        rhs(&self.tmp, &mut self.k3);

        combine(&mut self.tmp, y, dt, &self.k3);
        rhs(&self.tmp, &mut self.k4);

        let w = dt / 6.0;
        let y = y.as_mut_slice();
        let (k1, k2, k3, k4) = (
            self.k1.as_slice(),
            self.k2.as_slice(),
            self.k3.as_slice(),
            self.k4.as_slice(),
        );
        for i in 0..y.len() {
            y[i] += w * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
        }
    }
}

/// `out = y + a k`
fn combine(out: &mut DMatrix<f64>, y: &DMatrix<f64>, a: f64, k: &DMatrix<f64>) {
    for ((o, yv), kv) in out.as_mut_slice().iter_mut().zip(y.as_slice()).zip(k.as_slice()) {
        *o = yv + a * kv;
    }
}

/// Number of fixed steps needed so that `steps * dt >= t_end`.
pub fn step_count(dt: f64, t_end: f64) -> usize {
    let raw = t_end / dt;
    let rounded = raw.round();
    // absorb representation error such as 1.0 / 0.1 = 9.999999999999998
    if (raw - rounded).abs() <= 1e-9 * rounded.max(1.0) {
        rounded as usize
    } else {
        raw.ceil() as usize
    }
}
