//! Gaussian coupling matrices and their spectra.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::io::{fmt_real, parse_csv, parse_real, CsvTable};
use crate::rng::SeedStream;

/// Largest dimension accepted by [`eigenvalues`].
pub const MAX_EIGEN_DIM: usize = 4096;

/// `n x n` matrix with iid `N(0, sigma^2/n)` entries.
///
/// Entries are drawn in row-major order from `SeedStream::new(seed)`, so
/// `(n, sigma, seed)` reconstructs the matrix bit for bit.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectivityMatrix {
    sigma: f64,
    seed: Option<u64>,
    entries: DMatrix<f64>,
}

impl ConnectivityMatrix {
    pub fn sample(n: usize, sigma: f64, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n", "must be at least 1"));
        }
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(invalid("sigma", format!("must be positive, got {sigma}")));
        }
        let std_dev = sigma / (n as f64).sqrt();
        let mut rng = SeedStream::new(seed);
        let mut entries = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                entries[(i, j)] = std_dev * rng.standard_normal();
            }
        }
        Ok(Self {
            sigma,
            seed: Some(seed),
            entries,
        })
    }

    /// Wrap an explicit square matrix; `sigma` is recorded as metadata only.
    pub fn from_entries(entries: DMatrix<f64>, sigma: f64) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::DimensionMismatch {
                expected: entries.nrows(),
                got: entries.ncols(),
            });
        }
        if entries.nrows() == 0 {
            return Err(invalid("n", "must be at least 1"));
        }
        Ok(Self {
            sigma,
            seed: None,
            entries,
        })
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn provenance(&self) -> Provenance {
        Provenance {
            n: self.n(),
            sigma: self.sigma,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub n: usize,
    pub sigma: f64,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<Complex64>,
    pub source: Option<Provenance>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn radius(&self) -> f64 {
        self.eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_real_part(&self) -> f64 {
        self.eigenvalues
            .iter()
            .map(|z| z.re)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest distance from an eigenvalue to the nearest conjugate of
    /// another (or the same, for real ones) eigenvalue.
    pub fn conjugate_mismatch(&self) -> f64 {
        let mut used = vec![false; self.len()];
        let mut worst: f64 = 0.0;
        for (i, z) in self.eigenvalues.iter().enumerate() {
            if used[i] {
                continue;
            }
            let target = z.conj();
            let scale = 1.0 + z.norm();
            let (best, dist) = self
                .eigenvalues
                .iter()
                .enumerate()
                .filter(|(k, _)| !used[*k] || *k == i)
                .map(|(k, w)| (k, (w - target).norm()))
                .fold((i, f64::INFINITY), |acc, cur| if cur.1 < acc.1 { cur } else { acc });
            used[i] = true;
            used[best] = true;
            worst = worst.max(dist / scale);
        }
        worst
    }

    pub fn to_csv(&self) -> CsvTable {
        let mut t = CsvTable::new(&["re", "im"]);
        for z in &self.eigenvalues {
            t.push(vec![fmt_real(z.re), fmt_real(z.im)]);
        }
        t
    }
}

/// Read a `re,im` table.
pub fn parse_spectrum_csv(text: &str) -> Result<Vec<Complex64>> {
    let table = parse_csv(text)?;
    let (re, im) = match (table.column("re"), table.column("im")) {
        (Some(re), Some(im)) => (re, im),
        _ => {
            return Err(Error::Parse {
                line: 1,
                message: "header must contain `re` and `im`".into(),
            })
        }
    };
    table
        .rows
        .iter()
        .enumerate()
        .map(|(i, row)| Ok(Complex64::new(parse_real(&row[re], i + 2)?, parse_real(&row[im], i + 2)?)))
        .collect()
}

/// All eigenvalues of a real square matrix via Hessenberg reduction and
/// shifted QR (real Schur form).
pub fn eigenvalues(m: &DMatrix<f64>) -> Result<Spectrum> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: m.ncols(),
        });
    }
    if n > MAX_EIGEN_DIM {
        return Err(invalid("n", format!("eigensolver capped at {MAX_EIGEN_DIM}, got {n}")));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(invalid("matrix", "contains non-finite entries"));
    }
    if n == 0 {
        return Ok(Spectrum {
            eigenvalues: Vec::new(),
            source: None,
        });
    }
    let schur = nalgebra::Schur::try_new(m.clone(), f64::EPSILON, 100 * n.max(10))
        .ok_or(Error::EigenConvergence { n })?;
    let eig = schur.complex_eigenvalues();
    let mut eigenvalues: Vec<Complex64> = eig.iter().map(|z| Complex64::new(z.re, z.im)).collect();
    // 2x2 blocks give exact conjugate pairs; pin real eigenvalues to the axis
    for z in &mut eigenvalues {
        if z.im == 0.0 {
            z.im = 0.0;
        }
    }
    Ok(Spectrum {
        eigenvalues,
        source: None,
    })
}

pub fn matrix_spectrum(j: &ConnectivityMatrix) -> Result<Spectrum> {
    let mut sp = eigenvalues(j.entries())?;
    sp.source = Some(j.provenance());
    Ok(sp)
}

pub fn spectral_radius(m: &DMatrix<f64>) -> Result<f64> {
    Ok(eigenvalues(m)?.radius())
}

/// Predicted asymptotic spectral radius of `J diag(g)`:
/// `sqrt(sigma^2/n * sum g_i^2)`.
pub fn scaled_support_radius(sigma: f64, gains: &[f64]) -> f64 {
    if gains.is_empty() {
        return 0.0;
    }
    let mean_sq = gains.iter().map(|g| g * g).sum::<f64>() / gains.len() as f64;
    sigma * mean_sq.sqrt()
}

/// Radial Kolmogorov–Smirnov distance between the empirical law of `|λ|`
/// and the uniform-disc law `P(|λ| <= r) = r^2 / sigma^2` on `(0, sigma]`.
pub fn circular_law_discrepancy(sp: &Spectrum, sigma: f64) -> f64 {
    if sp.is_empty() || !(sigma > 0.0) {
        return 0.0;
    }
    let n = sp.len() as f64;
    let mut moduli: Vec<f64> = sp.eigenvalues.iter().map(|z| z.norm()).collect();
    moduli.sort_by(f64::total_cmp);
    let mut stat: f64 = 0.0;
    let mut i = 0;
    while i < moduli.len() && moduli[i] <= sigma {
        let r = moduli[i];
        let below = i as f64 / n;
        let mut k = i;
        while k < moduli.len() && moduli[k] == r {
            k += 1;
        }
        let at = k as f64 / n;
        let model = (r / sigma).powi(2);
        stat = stat.max((below - model).abs()).max((at - model).abs());
        i = k;
    }
    // r -> sigma
    stat.max((i as f64 / n - 1.0).abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogDet {
    /// `(1/n) log |det|`, `-inf` when singular.
    pub per_dim: f64,
    pub singular: bool,
}

/// `(1/n) log |det m|` from an LU factorization with partial pivoting.
pub fn log_abs_det(m: &DMatrix<f64>) -> LogDet {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "log_abs_det needs a square matrix");
    // row-major working copy; rows are swapped by index
    let mut a: Vec<f64> = Vec::with_capacity(n * n);
    for i in 0..n {
        a.extend(m.row(i).iter());
    }
    let mut sum = 0.0;
    for k in 0..n {
        let (p, pivot_abs) = (k..n)
            .map(|r| (r, a[r * n + k].abs()))
            .fold((k, -1.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        if pivot_abs == 0.0 {
            return LogDet {
                per_dim: f64::NEG_INFINITY,
                singular: true,
            };
        }
        if p != k {
            for c in 0..n {
                a.swap(k * n + c, p * n + c);
            }
        }
        let pivot = a[k * n + k];
        sum += pivot_abs.ln();
        let (upper, lower) = a.split_at_mut((k + 1) * n);
        let pivot_row = &upper[k * n + k + 1..k * n + n];
        for row in lower.chunks_exact_mut(n) {
            let factor = row[k] / pivot;
            if factor != 0.0 {
                for (x, u) in row[k + 1..].iter_mut().zip(pivot_row) {
                    *x -= factor * u;
                }
            }
        }
    }
    LogDet {
        per_dim: sum / n as f64,
        singular: false,
    }
}

/// `(1/n) log |det(-I + J)|` via triangular factorization.
pub fn log_abs_det_shifted(j: &ConnectivityMatrix) -> LogDet {
    let n = j.n();
    let mut m = j.entries().clone();
    for k in 0..n {
        m[(k, k)] -= 1.0;
    }
    log_abs_det(&m)
}

/// Eigenvalue form of the same quantity: `(1/n) sum log |λ - 1|`.
pub fn log_abs_det_shifted_spectral(sp: &Spectrum) -> f64 {
    let one = Complex64::new(1.0, 0.0);
    sp.eigenvalues.iter().map(|z| (z - one).norm().ln()).sum::<f64>() / sp.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeedStream;
    use proptest::prelude::*;

    #[test]
    fn sampling_is_deterministic() {
        let a = ConnectivityMatrix::sample(40, 1.3, 99).unwrap();
        let b = ConnectivityMatrix::sample(40, 1.3, 99).unwrap();
        assert!(a.entries().iter().zip(b.entries().iter()).all(|(x, y)| x.to_bits() == y.to_bits()));
        let c = ConnectivityMatrix::sample(40, 1.3, 100).unwrap();
        assert_ne!(a.entries(), c.entries());
    }

    #[test]
    fn sampling_rejects_bad_input() {
        assert!(ConnectivityMatrix::sample(0, 1.0, 1).is_err());
        assert!(ConnectivityMatrix::sample(3, 0.0, 1).is_err());
        assert!(ConnectivityMatrix::sample(3, f64::NAN, 1).is_err());
        assert!(ConnectivityMatrix::from_entries(DMatrix::zeros(2, 3), 1.0).is_err());
    }

    #[test]
    fn entry_variance_is_sigma_squared_over_n() {
        let j = ConnectivityMatrix::sample(1000, 1.0, 5).unwrap();
        let n2 = 1_000_000.0;
        let mean = j.entries().sum() / n2;
        let var = j.entries().iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n2 - 1.0);
        assert!(var > 0.9e-3 && var < 1.1e-3, "variance {var}");
    }

    #[test]
    fn scalar_entries_have_variance_sigma_squared() {
        let draws: crate::stats::RunningStats = (0..100_000u64)
            .map(|seed| ConnectivityMatrix::sample(1, 2.0, seed).unwrap().entries()[(0, 0)])
            .collect();
        assert!((draws.variance() - 4.0).abs() < 0.2, "variance {}", draws.variance());
    }

    #[test]
    fn small_known_spectra() {
        let sp = eigenvalues(&DMatrix::identity(3, 3)).unwrap();
        assert_eq!(sp.len(), 3);
        assert!(sp.eigenvalues.iter().all(|z| (z - Complex64::new(1.0, 0.0)).norm() < 1e-14));

        let rot = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        let mut ims: Vec<f64> = eigenvalues(&rot).unwrap().eigenvalues.iter().map(|z| {
            assert!(z.re.abs() < 1e-14);
            z.im
        }).collect();
        ims.sort_by(f64::total_cmp);
        assert!((ims[0] + 1.0).abs() < 1e-14 && (ims[1] - 1.0).abs() < 1e-14);

        assert!((spectral_radius(&-DMatrix::<f64>::identity(7, 7)).unwrap() - 1.0).abs() < 1e-14);
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, -3.0]));
        assert!((spectral_radius(&d).unwrap() - 3.0).abs() < 1e-14);
    }

    #[test]
    fn eigenvalues_reject_non_square_and_non_finite() {
        assert!(eigenvalues(&DMatrix::zeros(2, 3)).is_err());
        let mut m = DMatrix::<f64>::identity(2, 2);
        m[(0, 1)] = f64::NAN;
        assert!(eigenvalues(&m).is_err());
    }

    #[test]
    fn supercritical_spectral_radius_near_sigma() {
        let j = ConnectivityMatrix::sample(1000, 1.5, 21).unwrap();
        let r = matrix_spectrum(&j).unwrap().radius();
        assert!((1.40..=1.60).contains(&r), "radius {r}");
    }

    #[test]
    fn support_radius_special_cases() {
        assert_eq!(scaled_support_radius(1.7, &[1.0; 10]), 1.7);
        assert_eq!(scaled_support_radius(1.7, &[0.0; 10]), 0.0);
        let g = [0.2, 0.5, 0.9];
        let scaled: Vec<f64> = g.iter().map(|v| v * 0.5).collect();
        assert!((scaled_support_radius(1.3, &scaled) - 0.5 * scaled_support_radius(1.3, &g)).abs() < 1e-15);
    }

    #[test]
    fn column_scaled_radius_matches_prediction() {
        let n = 1000;
        let sigma = 1.5;
        let j = ConnectivityMatrix::sample(n, sigma, 8).unwrap();
        let mut rng = SeedStream::new(9);
        let gains: Vec<f64> = (0..n).map(|_| {
            let x: f64 = rng.uniform_in(-1.0, 1.0);
            1.0 - x.tanh().powi(2)
        }).collect();
        let mut m = j.entries().clone();
        for (k, mut col) in m.column_iter_mut().enumerate() {
            col *= gains[k];
        }
        let empirical = spectral_radius(&m).unwrap();
        let predicted = scaled_support_radius(sigma, &gains);
        assert!((empirical / predicted - 1.0).abs() < 0.05, "{empirical} vs {predicted}");
    }

    #[test]
    fn circular_law_statistic() {
        let j = ConnectivityMatrix::sample(2000, 1.0, 3).unwrap();
        let sp = matrix_spectrum(&j).unwrap();
        assert!((sp.radius() - 1.0).abs() < 0.05);
        let ks = circular_law_discrepancy(&sp, 1.0);
        assert!(ks < 0.05, "KS {ks}");

        let rotation = Complex64::from_polar(1.0, 0.7);
        let rotated = Spectrum {
            eigenvalues: sp.eigenvalues.iter().map(|z| z * rotation).collect(),
            source: None,
        };
        assert!((circular_law_discrepancy(&rotated, 1.0) - ks).abs() < 1e-12);

        let zeros = Spectrum {
            eigenvalues: vec![Complex64::new(0.0, 0.0); 50],
            source: None,
        };
        assert_eq!(circular_law_discrepancy(&zeros, 1.0), 1.0);
    }

    #[test]
    fn log_det_examples() {
        let zero = ConnectivityMatrix::from_entries(DMatrix::zeros(5, 5), 1.0).unwrap();
        let ld = log_abs_det_shifted(&zero);
        assert!(!ld.singular && ld.per_dim.abs() < 1e-15);

        let three = ConnectivityMatrix::from_entries(DMatrix::from_diagonal_element(2, 2, 3.0), 1.0).unwrap();
        assert!((log_abs_det_shifted(&three).per_dim - 2.0f64.ln()).abs() < 1e-15);

        let eye = ConnectivityMatrix::from_entries(DMatrix::identity(4, 4), 1.0).unwrap();
        let ld = log_abs_det_shifted(&eye);
        assert!(ld.singular && ld.per_dim == f64::NEG_INFINITY);
    }

    #[test]
    fn csv_export_round_trips() {
        let j = ConnectivityMatrix::sample(30, 1.2, 4).unwrap();
        let sp = matrix_spectrum(&j).unwrap();
        let text = sp.to_csv().render();
        assert!(text.starts_with("re,im\n"));
        let back = parse_spectrum_csv(&text).unwrap();
        assert_eq!(back, sp.eigenvalues);
        assert!(parse_spectrum_csv("x,y\n1,2\n").is_err());
        assert!(parse_spectrum_csv("re,im\n1,abc\n").is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn spectra_are_conjugate_closed(seed in any::<u64>(), n in 1usize..80, sigma in 0.2f64..3.0) {
            let j = ConnectivityMatrix::sample(n, sigma, seed).unwrap();
            let sp = matrix_spectrum(&j).unwrap();
            prop_assert_eq!(sp.len(), n);
            prop_assert!(sp.conjugate_mismatch() < 1e-9);
        }

        #[test]
        fn factorization_matches_eigenvalue_sum(seed in any::<u64>(), n in 2usize..300, sigma in 0.3f64..2.5) {
            let j = ConnectivityMatrix::sample(n, sigma, seed).unwrap();
            let lu = log_abs_det_shifted(&j);
            prop_assume!(!lu.singular);
            let eig = log_abs_det_shifted_spectral(&matrix_spectrum(&j).unwrap());
            let scale = lu.per_dim.abs().max(1e-3);
            prop_assert!((lu.per_dim - eig).abs() / scale < 1e-8, "{} vs {}", lu.per_dim, eig);
        }
    }
}
