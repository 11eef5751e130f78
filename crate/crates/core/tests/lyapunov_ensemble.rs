//! Longer ensemble runs of the Lyapunov estimators. The realizations use
//! `dt = 0.05` where only the exponent matters; the estimate is insensitive
//! to `dt` below 0.1 (checked in `halving_dt_and_doubling_renorm_interval`).

use edgechaos::lyapunov::{
    lyapunov_curve, max_lyapunov_benettin, susceptibility_rate, susceptibility_trace, BenettinParams, CurveParams,
    SusceptibilityParams,
};
use edgechaos::rng::{derive_seed, SeedStream};
use edgechaos::{ConnectivityMatrix, SigmoidSpec};
use nalgebra::DVector;

fn x0(n: usize, seed: u64) -> DVector<f64> {
    let mut rng = SeedStream::new(derive_seed(seed, 1));
    DVector::from_fn(n, |_, _| rng.uniform_in(-1.0, 1.0))
}

fn coarse(t_total: f64) -> CurveParams {
    CurveParams {
        benettin: BenettinParams {
            dt: 0.05,
            transient: 200.0,
            t_total,
            renorm_every: 1.0,
        },
        ..Default::default()
    }
}

#[test]
fn mean_exponent_is_positive_above_the_transition() {
    let pts = lyapunov_curve(&[1.5], 500, 6, &coarse(800.0), 11).unwrap();
    assert!(pts[0].mean > 0.0, "{:?}", pts[0]);
}

#[test]
fn subcritical_curve_rises_towards_zero() {
    let pts = lyapunov_curve(&[0.6, 0.8, 1.0], 200, 4, &coarse(800.0), 11).unwrap();
    assert!(pts.windows(2).all(|w| w[0].mean < w[1].mean), "{pts:?}");
    assert!(pts[0].mean < 0.0 && pts[1].mean < 0.0);
    assert!(pts[2].mean <= 2.0 * pts[2].stderr, "{:?}", pts[2]);
}

#[test]
fn susceptibility_rate_is_twice_the_tangent_rate() {
    let s = SigmoidSpec::tanh();
    let (n, dt, t0, window) = (200, 0.05, 200.0, 1000.0);
    let mut compared = 0;
    for sigma in [1.3, 1.5, 2.0] {
        for seed in 0..3u64 {
            let j = ConnectivityMatrix::sample(n, sigma, seed).unwrap();
            let x = x0(n, seed);
            let params = BenettinParams {
                dt,
                transient: t0,
                t_total: t0 + window,
                renorm_every: 1.0,
            };
            let b = max_lyapunov_benettin(&j, &s, &x, &params, 3).unwrap();
            // a 20% comparison is meaningless for exponents not resolved from 0
            if b.lambda.abs() < 5.0 * b.stderr {
                continue;
            }
            let trace = susceptibility_trace(
                &j,
                &s,
                &x,
                &SusceptibilityParams {
                    dt,
                    t0,
                    tau_max: window,
                    record_every: 1.0,
                },
            )
            .unwrap();
            let rate = susceptibility_rate(&trace).unwrap();
            assert!(
                (rate - 2.0 * b.lambda).abs() <= 0.2 * 2.0 * b.lambda.abs(),
                "sigma {sigma} seed {seed}: {rate} vs 2 x {}",
                b.lambda
            );
            compared += 1;
        }
    }
    assert!(compared >= 3, "only {compared} resolved realizations");
}

#[test]
fn halving_dt_and_doubling_renorm_interval() {
    let s = SigmoidSpec::tanh();
    let n = 200;
    let j = ConnectivityMatrix::sample(n, 1.5, 0).unwrap();
    let x = x0(n, 0);
    let base = BenettinParams {
        dt: 0.01,
        transient: 200.0,
        t_total: 1200.0,
        renorm_every: 1.0,
    };
    let reference = max_lyapunov_benettin(&j, &s, &x, &base, 3).unwrap();
    for variant in [
        BenettinParams { dt: 0.005, ..base },
        BenettinParams {
            renorm_every: 2.0,
            ..base
        },
    ] {
        let other = max_lyapunov_benettin(&j, &s, &x, &variant, 3).unwrap();
        let tol = 2.0 * reference.stderr.hypot(other.stderr);
        assert!(
            (other.lambda - reference.lambda).abs() <= tol,
            "{variant:?}: {} vs {} (tol {tol})",
            other.lambda,
            reference.lambda
        );
    }
}
