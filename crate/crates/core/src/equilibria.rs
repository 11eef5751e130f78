//! Equilibria of `x = J S(x)`: damped Newton, multi-start enumeration with
//! deduplication, stability labels, and a brute-force oracle for `n <= 2`.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complexity::rho_of_epsilon;
use crate::error::{invalid, Error, Result};
use crate::io::{fmt_real, CsvTable};
use crate::netmodel::{jacobian_at, vector_field, SigmoidSpec};
use crate::randmat::{eigenvalues, ConnectivityMatrix};
use crate::rng::{derive_seed, SeedStream};
use crate::stats::RunningStats;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    /// Convergence when `|-x + J S(x)|_inf <= tol`.
    pub tol: f64,
    pub max_iter: usize,
    pub max_backtracks: usize,
    /// Divergence when `|x|_inf` exceeds this; `None` uses ten times the
    /// a-priori bound `max_i sum_j |J_ij| sup|S|`.
    pub divergence_cap: Option<f64>,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 100,
            max_backtracks: 30,
            divergence_cap: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NewtonFailure {
    BudgetExhausted,
    /// Linearization singular even after Tikhonov regularization.
    Singular,
    Diverged,
    /// No residual decrease after the full backtracking budget.
    Stalled,
}

/// `max_i sum_j |J_ij| * sup|S|`, a bound on `|x|_inf` for every equilibrium.
pub fn equilibrium_bound(j: &ConnectivityMatrix, s: &SigmoidSpec) -> f64 {
    j.entries()
        .row_iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
        * s.saturation()
}

fn solve_step(jac: &DMatrix<f64>, rhs: &DVector<f64>) -> Option<DVector<f64>> {
    if let Some(d) = jac.clone().lu().solve(rhs) {
        if d.iter().all(|v| v.is_finite()) {
            return Some(d);
        }
    }
    // (A^T A + mu I) d = A^T b
    let n = jac.nrows();
    let ata = jac.transpose() * jac;
    let mu = 1e-10 * (1.0 + ata.trace() / n as f64);
    let reg = ata + DMatrix::identity(n, n) * mu;
    let d = reg.cholesky()?.solve(&(jac.transpose() * rhs));
    d.iter().all(|v| v.is_finite()).then_some(d)
}

/// Damped Newton on `F(x) = -x + J S(x)` from `x0`, halving the step while
/// `|F|_2` fails to decrease.
pub fn newton_solve(
    j: &ConnectivityMatrix,
    s: &SigmoidSpec,
    x0: &DVector<f64>,
    opts: &NewtonOptions,
) -> Result<std::result::Result<DVector<f64>, NewtonFailure>> {
    if !(opts.tol > 0.0) {
        return Err(invalid("tol", format!("must be positive, got {}", opts.tol)));
    }
    let cap = opts
        .divergence_cap
        .unwrap_or_else(|| 10.0 * equilibrium_bound(j, s) + 10.0);
    let mut x = x0.clone();
    let mut f = vector_field(j, s, &x)?;
    for _ in 0..opts.max_iter {
        if f.amax() <= opts.tol {
            return Ok(Ok(x));
        }
        let jac = jacobian_at(j, s, &x)?;
        let Some(step) = solve_step(&jac, &(-&f)) else {
            return Ok(Err(NewtonFailure::Singular));
        };
        let merit = f.norm();
        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..=opts.max_backtracks {
            let trial = &x + &step * alpha;
            let ft = vector_field(j, s, &trial)?;
            if ft.norm() < merit {
                accepted = Some((trial, ft));
                break;
            }
            alpha *= 0.5;
        }
        let Some((nx, nf)) = accepted else {
            return Ok(Err(NewtonFailure::Stalled));
        };
        x = nx;
        f = nf;
        if x.amax() > cap {
            return Ok(Err(NewtonFailure::Diverged));
        }
    }
    if f.amax() <= opts.tol {
        Ok(Ok(x))
    } else {
        Ok(Err(NewtonFailure::BudgetExhausted))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Equilibrium {
    pub x: DVector<f64>,
    /// `|-x + J S(x)|_inf`
    pub residual: f64,
    /// Eigenvalues of the Jacobian with positive real part; `None` when not
    /// classified.
    pub unstable_dims: Option<usize>,
}

impl Equilibrium {
    pub fn is_stable(&self) -> Option<bool> {
        self.unstable_dims.map(|k| k == 0)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SearchStats {
    pub starts: usize,
    pub successes: usize,
    pub budget_exhausted: usize,
    pub singular: usize,
    pub diverged: usize,
    pub stalled: usize,
}

impl SearchStats {
    fn record(&mut self, outcome: &std::result::Result<DVector<f64>, NewtonFailure>) {
        self.starts += 1;
        match outcome {
            Ok(_) => self.successes += 1,
            Err(NewtonFailure::BudgetExhausted) => self.budget_exhausted += 1,
            Err(NewtonFailure::Singular) => self.singular += 1,
            Err(NewtonFailure::Diverged) => self.diverged += 1,
            Err(NewtonFailure::Stalled) => self.stalled += 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumSet {
    pub roots: Vec<Equilibrium>,
    pub residual_tol: f64,
    pub dedup_tol: f64,
    pub search: SearchStats,
}

impl EquilibriumSet {
    pub fn count(&self) -> usize {
        self.roots.len()
    }

    fn position(&self, x: &DVector<f64>) -> Option<usize> {
        self.roots.iter().position(|r| (&r.x - x).norm() <= self.dedup_tol)
    }

    pub fn contains(&self, x: &DVector<f64>) -> bool {
        self.position(x).is_some()
    }

    pub fn origin(&self) -> Option<&Equilibrium> {
        self.roots.iter().find(|r| r.x.amax() == 0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOptions {
    pub n_starts: usize,
    /// Half-width of the box the starts are drawn from; `None` uses
    /// `3 sigma sup|S|`.
    pub box_radius: Option<f64>,
    pub seed: u64,
    /// `None` uses `1e-6 sqrt(n)`.
    pub dedup_tol: Option<f64>,
    pub newton: NewtonOptions,
    pub classify: bool,
}

impl SearchOptions {
    pub fn new(n_starts: usize, seed: u64) -> Self {
        Self {
            n_starts,
            box_radius: None,
            seed,
            dedup_tol: None,
            newton: NewtonOptions::default(),
            classify: true,
        }
    }

    pub fn with_box(mut self, radius: f64) -> Self {
        self.box_radius = Some(radius);
        self
    }
}

/// Multi-start Newton from the origin and `n_starts` points uniform in the
/// centered box. Roots are deduplicated, closed under `x -> -x` and, when
/// requested, labelled by the number of unstable Jacobian eigenvalues.
pub fn find_equilibria(j: &ConnectivityMatrix, s: &SigmoidSpec, opts: &SearchOptions) -> Result<EquilibriumSet> {
    if opts.n_starts == 0 {
        return Err(invalid("n_starts", "must be at least 1"));
    }
    let n = j.n();
    let box_radius = opts.box_radius.unwrap_or(3.0 * j.sigma() * s.saturation());
    if !(box_radius > 0.0) || !box_radius.is_finite() {
        return Err(invalid("box_radius", format!("must be positive, got {box_radius}")));
    }
    let dedup_tol = opts.dedup_tol.unwrap_or(1e-6 * (n as f64).sqrt());

    let mut rng = SeedStream::new(opts.seed);
    let mut starts = vec![DVector::zeros(n)];
    for _ in 0..opts.n_starts {
        starts.push(DVector::from_fn(n, |_, _| rng.uniform_in(-box_radius, box_radius)));
    }
    let outcomes: Vec<_> = starts
        .par_iter()
        .map(|x0| newton_solve(j, s, x0, &opts.newton))
        .collect::<Result<_>>()?;

    let mut set = EquilibriumSet {
        roots: Vec::new(),
        residual_tol: opts.newton.tol,
        dedup_tol,
        search: SearchStats::default(),
    };
    let insert = |set: &mut EquilibriumSet, x: DVector<f64>| -> Result<()> {
        if set.contains(&x) {
            return Ok(());
        }
        let residual = vector_field(j, s, &x)?.amax();
        if residual <= opts.newton.tol {
            set.roots.push(Equilibrium {
                x,
                residual,
                unstable_dims: None,
            });
        }
        Ok(())
    };
    for outcome in &outcomes {
        set.search.record(outcome);
        if let Ok(x) = outcome {
            insert(&mut set, x.clone())?;
        }
    }
    let found: Vec<DVector<f64>> = set.roots.iter().map(|r| -&r.x).collect();
    for x in found {
        insert(&mut set, x)?;
    }
    // the origin is an exact root of every odd field
    if set.origin().is_none() && !set.contains(&DVector::zeros(n)) {
        set.roots.insert(
            0,
            Equilibrium {
                x: DVector::zeros(n),
                residual: 0.0,
                unstable_dims: None,
            },
        );
    }
    if opts.classify {
        let labels: Vec<usize> = set
            .roots
            .par_iter()
            .map(|r| {
                let sp = eigenvalues(&jacobian_at(j, s, &r.x)?)?;
                Ok(sp.eigenvalues.iter().filter(|z| z.re > 0.0).count())
            })
            .collect::<Result<_>>()?;
        for (r, k) in set.roots.iter_mut().zip(labels) {
            r.unstable_dims = Some(k);
        }
    }
    Ok(set)
}

/// Exhaustive root count in `[-box_radius, box_radius]^n` for `n <= 2`.
///
/// `n = 1` counts sign changes of `-x + J S(x)` on a uniform grid; `n = 2`
/// runs an independent 2x2 Newton iteration from the center of every grid
/// cell and deduplicates the limits that land in the box.
pub fn grid_oracle(j: &ConnectivityMatrix, s: &SigmoidSpec, box_radius: f64, resolution: usize) -> Result<usize> {
    if resolution < 2 {
        return Err(invalid("resolution", "need at least 2 cells"));
    }
    if !(box_radius > 0.0) {
        return Err(invalid("box_radius", format!("must be positive, got {box_radius}")));
    }
    let e = j.entries();
    match j.n() {
        1 => {
            let a = e[(0, 0)];
            let f = |x: f64| -x + a * s.value(x);
            let h = 2.0 * box_radius / resolution as f64;
            let values: Vec<f64> = (0..=resolution).map(|k| f(-box_radius + k as f64 * h)).collect();
            let zeros = values.iter().filter(|v| **v == 0.0).count();
            let crossings = values.windows(2).filter(|w| w[0] * w[1] < 0.0).count();
            Ok(zeros + crossings)
        }
        2 => {
            let (a, b, c, d) = (e[(0, 0)], e[(0, 1)], e[(1, 0)], e[(1, 1)]);
            let field = |x: [f64; 2]| {
                let (s0, s1) = (s.value(x[0]), s.value(x[1]));
                [-x[0] + a * s0 + b * s1, -x[1] + c * s0 + d * s1]
            };
            let newton = |mut x: [f64; 2]| -> Option<[f64; 2]> {
                for _ in 0..60 {
                    let f = field(x);
                    if f[0].abs().max(f[1].abs()) <= 1e-12 {
                        return Some(x);
                    }
                    let (g0, g1) = (s.deriv(x[0]), s.deriv(x[1]));
                    let m = [[-1.0 + a * g0, b * g1], [c * g0, -1.0 + d * g1]];
                    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
                    if det == 0.0 || !det.is_finite() {
                        return None;
                    }
                    let dx0 = (-f[0] * m[1][1] + f[1] * m[0][1]) / det;
                    let dx1 = (-f[1] * m[0][0] + f[0] * m[1][0]) / det;
                    let norm = |f: [f64; 2]| f[0].hypot(f[1]);
                    let base = norm(f);
                    let mut t = 1.0;
                    loop {
                        let trial = [x[0] + t * dx0, x[1] + t * dx1];
                        if norm(field(trial)) < base || t < 1e-9 {
                            x = trial;
                            break;
                        }
                        t *= 0.5;
                    }
                    if !x[0].is_finite() || !x[1].is_finite() {
                        return None;
                    }
                }
                let f = field(x);
                (f[0].abs().max(f[1].abs()) <= 1e-12).then_some(x)
            };
            let h = 2.0 * box_radius / resolution as f64;
            let inside = box_radius * (1.0 + 1e-12);
            let mut roots: Vec<[f64; 2]> = Vec::new();
            for i in 0..resolution {
                for k in 0..resolution {
                    let center = [-box_radius + (i as f64 + 0.5) * h, -box_radius + (k as f64 + 0.5) * h];
                    if let Some(r) = newton(center) {
                        if r[0].abs() <= inside
                            && r[1].abs() <= inside
                            && !roots.iter().any(|q| (q[0] - r[0]).hypot(q[1] - r[1]) <= 1e-8)
                        {
                            roots.push(r);
                        }
                    }
                }
            }
            Ok(roots.len())
        }
        n => Err(invalid("n", format!("grid oracle supports n <= 2, got {n}"))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountEstimate {
    pub sigma: f64,
    pub n: usize,
    pub mean: f64,
    pub stderr: f64,
    pub n_matrices: usize,
    pub counts: Vec<usize>,
    /// Matrix seed of each realization.
    pub seeds: Vec<u64>,
    pub search: SearchStats,
}

impl CountEstimate {
    pub fn to_csv(&self) -> CsvTable {
        let mut t = CsvTable::new(&["sigma", "n", "realization", "count"]);
        for (i, c) in self.counts.iter().enumerate() {
            t.push(vec![fmt_real(self.sigma), self.n.to_string(), i.to_string(), c.to_string()]);
        }
        t
    }
}

/// Average equilibrium count over `n_matrices` realizations. Realization
/// `i` samples `J` with `derive_seed(seed, i)` and draws its starts from
/// `derive_seed(matrix_seed, 1)`.
pub fn mean_count(sigma: f64, n: usize, n_matrices: usize, n_starts: usize, seed: u64) -> Result<CountEstimate> {
    mean_count_with(sigma, n, n_matrices, seed, &SigmoidSpec::tanh(), |matrix_seed| {
        let mut o = SearchOptions::new(n_starts, derive_seed(matrix_seed, 1));
        o.classify = false;
        o
    })
}

pub fn mean_count_with<F>(
    sigma: f64,
    n: usize,
    n_matrices: usize,
    seed: u64,
    s: &SigmoidSpec,
    options: F,
) -> Result<CountEstimate>
where
    F: Fn(u64) -> SearchOptions + Sync,
{
    if n_matrices == 0 {
        return Err(invalid("n_matrices", "must be at least 1"));
    }
    let results: Vec<(u64, EquilibriumSet)> = (0..n_matrices as u64)
        .into_par_iter()
        .map(|i| {
            let matrix_seed = derive_seed(seed, i);
            let j = ConnectivityMatrix::sample(n, sigma, matrix_seed)?;
            Ok((matrix_seed, find_equilibria(&j, s, &options(matrix_seed))?))
        })
        .collect::<Result<_>>()?;
    let mut search = SearchStats::default();
    let mut counts = Vec::with_capacity(n_matrices);
    let mut seeds = Vec::with_capacity(n_matrices);
    for (matrix_seed, set) in &results {
        search.starts += set.search.starts;
        search.successes += set.search.successes;
        search.budget_exhausted += set.search.budget_exhausted;
        search.singular += set.search.singular;
        search.diverged += set.search.diverged;
        search.stalled += set.search.stalled;
        counts.push(set.count());
        seeds.push(*matrix_seed);
    }
    let stats: RunningStats = counts.iter().map(|c| *c as f64).collect();
    Ok(CountEstimate {
        sigma,
        n,
        mean: stats.mean,
        stderr: stats.stderr(),
        n_matrices,
        counts,
        seeds,
        search,
    })
}

/// Whether every equilibrium found with a wide search lies within
/// `1.1 rho(sigma)` of the origin in the sup norm.
pub fn ball_confinement_check(
    j: &ConnectivityMatrix,
    sigma: f64,
    s: &SigmoidSpec,
    n_starts: usize,
    seed: u64,
) -> Result<bool> {
    let rho = rho_of_epsilon(sigma, s.base());
    let mut opts = SearchOptions::new(n_starts, seed);
    opts.classify = false;
    let set = find_equilibria(j, s, &opts)?;
    Ok(set.roots.iter().all(|r| r.x.amax() <= 1.1 * rho))
}

/// Largest sup-norm of any stored root.
pub fn max_root_extent(set: &EquilibriumSet) -> f64 {
    set.roots.iter().map(|r| r.x.amax()).fold(0.0, f64::max)
}

impl From<NewtonFailure> for Error {
    fn from(f: NewtonFailure) -> Self {
        invalid("newton", format!("{f:?}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(a: f64) -> ConnectivityMatrix {
        ConnectivityMatrix::from_entries(DMatrix::from_element(1, 1, a), 1.0).unwrap()
    }

    /// Bisection on x - 2 tanh x over [1.5, 2.5].
    fn scalar_root_oracle() -> f64 {
        let (mut lo, mut hi) = (1.5f64, 2.5f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid - 2.0 * mid.tanh() < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn newton_from_origin_returns_immediately() {
        let j = ConnectivityMatrix::sample(6, 2.0, 3).unwrap();
        let x = newton_solve(&j, &SigmoidSpec::tanh(), &DVector::zeros(6), &NewtonOptions::default())
            .unwrap()
            .unwrap();
        assert_eq!(x, DVector::zeros(6));
    }

    #[test]
    fn newton_scalar_root() {
        let oracle = scalar_root_oracle();
        assert!((oracle - 1.915008).abs() < 1e-6);
        let x = newton_solve(&scalar(2.0), &SigmoidSpec::tanh(), &DVector::from_element(1, 2.0), &NewtonOptions::default())
            .unwrap()
            .unwrap();
        assert!((x[0] - oracle).abs() < 1e-10);
    }

    #[test]
    fn newton_contraction_goes_to_zero() {
        for x0 in [-5.0, -0.3, 0.7, 12.0] {
            let x = newton_solve(&scalar(0.5), &SigmoidSpec::tanh(), &DVector::from_element(1, x0), &NewtonOptions::default())
                .unwrap()
                .unwrap();
            assert!(x[0].abs() < 1e-10);
        }
    }

    #[test]
    fn newton_rejects_bad_tolerance() {
        let o = NewtonOptions {
            tol: 0.0,
            ..Default::default()
        };
        assert!(newton_solve(&scalar(2.0), &SigmoidSpec::tanh(), &DVector::from_element(1, 1.0), &o).is_err());
    }

    #[test]
    fn newton_reports_budget_exhaustion() {
        let o = NewtonOptions {
            max_iter: 1,
            ..Default::default()
        };
        let r = newton_solve(&scalar(2.0), &SigmoidSpec::tanh(), &DVector::from_element(1, 5.0), &o).unwrap();
        assert_eq!(r, Err(NewtonFailure::BudgetExhausted));
    }

    #[test]
    fn rank_deficient_linearization_is_regularized() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let d = solve_step(&m, &DVector::from_vec(vec![1.0, 1.0])).unwrap();
        assert!(d.iter().all(|v| v.is_finite()));
        // least-squares direction
        assert!((d[0] - 0.5).abs() < 1e-6 && (d[1] - 0.5).abs() < 1e-6);
    }

    #[test]
    fn subcritical_unique_equilibrium() {
        let j = ConnectivityMatrix::sample(10, 0.5, 1).unwrap();
        let set = find_equilibria(&j, &SigmoidSpec::tanh(), &SearchOptions::new(200, 2)).unwrap();
        assert_eq!(set.count(), 1);
        assert_eq!(set.roots[0].x, DVector::zeros(10));
        assert_eq!(set.roots[0].unstable_dims, Some(0));
        assert_eq!(set.search.starts, 201);
    }

    #[test]
    fn scalar_supercritical_equilibria() {
        let set = find_equilibria(&scalar(2.0), &SigmoidSpec::tanh(), &SearchOptions::new(50, 4).with_box(4.0)).unwrap();
        assert_eq!(set.count(), 3);
        let oracle = scalar_root_oracle();
        let mut xs: Vec<(f64, Option<usize>)> = set.roots.iter().map(|r| (r.x[0], r.unstable_dims)).collect();
        xs.sort_by(|a, b| a.0.total_cmp(&b.0));
        assert!((xs[0].0 + oracle).abs() < 1e-9 && xs[0].1 == Some(0));
        assert!(xs[1].0 == 0.0 && xs[1].1 == Some(1));
        assert!((xs[2].0 - oracle).abs() < 1e-9 && xs[2].1 == Some(0));
    }

    #[test]
    fn equilibrium_sets_are_symmetric_and_exact() {
        let s = SigmoidSpec::tanh();
        for seed in 0..8 {
            let j = ConnectivityMatrix::sample(5, 2.5, seed).unwrap();
            let set = find_equilibria(&j, &s, &SearchOptions::new(150, seed + 100)).unwrap();
            assert_eq!(set.count() % 2, 1);
            assert!(set.origin().is_some());
            for r in &set.roots {
                // recheck residual independently of the solver
                let res = (-&r.x + j.entries() * r.x.map(|v| v.tanh())).amax();
                assert!(res <= set.residual_tol);
                assert!(set.contains(&-&r.x));
            }
            for (a, ra) in set.roots.iter().enumerate() {
                for rb in &set.roots[a + 1..] {
                    assert!((&ra.x - &rb.x).norm() > set.dedup_tol);
                }
            }
        }
    }

    #[test]
    fn origin_label_matches_spectrum() {
        let s = SigmoidSpec::tanh();
        for seed in 0..12 {
            let j = ConnectivityMatrix::sample(6, 1.2, seed).unwrap();
            let set = find_equilibria(&j, &s, &SearchOptions::new(20, seed)).unwrap();
            let origin = set.origin().unwrap();
            let max_re = eigenvalues(j.entries()).unwrap().max_real_part();
            assert_eq!(origin.is_stable().unwrap(), max_re < 1.0, "seed {seed}");
        }
    }

    #[test]
    fn grid_oracle_scalar() {
        let s = SigmoidSpec::tanh();
        assert_eq!(grid_oracle(&scalar(2.0), &s, 4.0, 10_000).unwrap(), 3);
        assert_eq!(grid_oracle(&scalar(0.5), &s, 4.0, 10_000).unwrap(), 1);
        assert_eq!(grid_oracle(&scalar(0.5), &s, 4.0, 9_999).unwrap(), 1);
        let j3 = ConnectivityMatrix::sample(3, 1.0, 1).unwrap();
        assert!(grid_oracle(&j3, &s, 1.0, 10).is_err());
    }

    #[test]
    fn grid_oracle_planar_agrees_with_search() {
        let s = SigmoidSpec::tanh();
        let mut agree = 0;
        let total = 100;
        for seed in 0..total {
            let j = ConnectivityMatrix::sample(2, 3.0, 1000 + seed).unwrap();
            let bound = equilibrium_bound(&j, &s) * 1.01;
            let oracle = grid_oracle(&j, &s, bound, 120).unwrap();
            assert_eq!(oracle % 2, 1, "seed {seed}");
            let mut o = SearchOptions::new(200, seed).with_box(bound);
            o.classify = false;
            if find_equilibria(&j, &s, &o).unwrap().count() == oracle {
                agree += 1;
            }
        }
        assert!(agree as f64 >= 0.95 * total as f64, "agreement {agree}/{total}");
    }

    #[test]
    fn mean_count_subcritical_and_csv() {
        let est = mean_count(0.5, 8, 50, 50, 7).unwrap();
        assert_eq!(est.mean, 1.0);
        assert!(est.counts.iter().all(|c| *c == 1));
        let csv = est.to_csv().render();
        assert!(csv.starts_with("sigma,n,realization,count\n"));
        assert_eq!(csv.lines().count(), 51);
        let again = mean_count(0.5, 8, 50, 50, 7).unwrap();
        assert_eq!(again.to_csv().render(), csv);
    }

    #[test]
    fn confinement_vacuous_below_criticality() {
        let j = ConnectivityMatrix::sample(30, 0.9, 5).unwrap();
        assert!(ball_confinement_check(&j, 0.9, &SigmoidSpec::tanh(), 50, 1).unwrap());
    }

    #[test]
    fn confinement_near_criticality() {
        let j = ConnectivityMatrix::sample(100, 1.05, 1).unwrap();
        assert!(ball_confinement_check(&j, 1.05, &SigmoidSpec::tanh(), 100, 2).unwrap());
    }
}
