//! Numerical laboratory for random rate networks `dx/dt = -x + J S(x)` with
//! Gaussian couplings of variance `sigma^2/n`: equilibrium counting, the
//! topological complexity `c(sigma)`, maximal Lyapunov exponents across the
//! `sigma = 1` transition, and the two-dimensional fakir-bed scattering
//! experiment.

// `!(x > 0.0)` is used on purpose so that NaN fails parameter checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod complexity;
pub mod equilibria;
pub mod error;
pub mod fakir;
pub mod io;
pub mod lyapunov;
pub mod netmodel;
pub mod ode;
pub mod randmat;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
pub use netmodel::{BaseSigmoid, SigmoidSpec};
pub use randmat::{ConnectivityMatrix, Spectrum};
