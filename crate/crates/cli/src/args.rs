//! Command-line definitions.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use edgechaos::io::{parse_int_list, parse_real_list};
use edgechaos::randmat::MAX_EIGEN_DIM;

#[derive(Debug, Parser)]
#[command(name = "edgechaos", version, about = "Seeded batch experiments on random rate networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// Master seed; per-task seeds are `derive_seed(seed, task_index)`.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (defaults to the number of cores).
    #[arg(long, value_parser = positive_int)]
    pub threads: Option<usize>,
    /// Output directory, created if missing.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Encoding of the data tables.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Also render an SVG plot of the main result.
    #[arg(long)]
    pub svg: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalues of one coupling matrix.
    Spectrum(SpectrumArgs),
    /// RK4 trajectory of the network from a random initial state.
    Trajectory(TrajectoryArgs),
    /// Equilibria of one network by multi-start Newton.
    Equilibria(EquilibriaArgs),
    /// Mean equilibrium count over independent networks.
    MeanCount(MeanCountArgs),
    /// Closed-form or Monte-Carlo complexity c(sigma).
    Complexity(ComplexityArgs),
    /// Ensemble mean of (1/n) log|det(J - I)|.
    KacRice(KacRiceArgs),
    /// Maximal Lyapunov exponent at one sigma.
    Lyapunov(LyapunovArgs),
    /// Maximal Lyapunov exponent over a sigma grid.
    LyapunovCurve(LyapunovCurveArgs),
    /// Fakir-bed exponent against the number of hills.
    FakirSlope(FakirSlopeArgs),
    /// Width of the critical region for a given network size.
    EdgeThickness(EdgeThicknessArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Spectrum(_) => "spectrum",
            Command::Trajectory(_) => "trajectory",
            Command::Equilibria(_) => "equilibria",
            Command::MeanCount(_) => "mean-count",
            Command::Complexity(_) => "complexity",
            Command::KacRice(_) => "kac-rice",
            Command::Lyapunov(_) => "lyapunov",
            Command::LyapunovCurve(_) => "lyapunov-curve",
            Command::FakirSlope(_) => "fakir-slope",
            Command::EdgeThickness(_) => "edge-thickness",
        }
    }

    pub fn common(&self) -> &Common {
        match self {
            Command::Spectrum(a) => &a.common,
            Command::Trajectory(a) => &a.common,
            Command::Equilibria(a) => &a.common,
            Command::MeanCount(a) => &a.common,
            Command::Complexity(a) => &a.common,
            Command::KacRice(a) => &a.common,
            Command::Lyapunov(a) => &a.common,
            Command::LyapunovCurve(a) => &a.common,
            Command::FakirSlope(a) => &a.common,
            Command::EdgeThickness(a) => &a.common,
        }
    }

    /// Parsed configuration as JSON, for the manifest.
    pub fn config(&self) -> serde_json::Value {
        let v = match self {
            Command::Spectrum(a) => serde_json::to_value(a),
            Command::Trajectory(a) => serde_json::to_value(a),
            Command::Equilibria(a) => serde_json::to_value(a),
            Command::MeanCount(a) => serde_json::to_value(a),
            Command::Complexity(a) => serde_json::to_value(a),
            Command::KacRice(a) => serde_json::to_value(a),
            Command::Lyapunov(a) => serde_json::to_value(a),
            Command::LyapunovCurve(a) => serde_json::to_value(a),
            Command::FakirSlope(a) => serde_json::to_value(a),
            Command::EdgeThickness(a) => serde_json::to_value(a),
        };
        v.unwrap_or(serde_json::Value::Null)
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SpectrumArgs {
    #[arg(long, default_value_t = 500, value_parser = eigen_dim)]
    pub n: usize,
    #[arg(long, default_value_t = 1.0, value_parser = positive_real, allow_negative_numbers = true)]
    pub sigma: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TrajectoryArgs {
    #[arg(long, default_value_t = 100, value_parser = positive_int)]
    pub n: usize,
    #[arg(long, default_value_t = 1.5, value_parser = positive_real, allow_negative_numbers = true)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0.01, value_parser = positive_real, allow_negative_numbers = true)]
    pub dt: f64,
    #[arg(long, default_value_t = 100.0, value_parser = positive_real, allow_negative_numbers = true)]
    pub t_end: f64,
    /// Keep every k-th step.
    #[arg(long, value_parser = positive_int)]
    pub store_every: Option<usize>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EquilibriaArgs {
    #[arg(long, default_value_t = 4, value_parser = eigen_dim)]
    pub n: usize,
    #[arg(long, default_value_t = 2.0, value_parser = positive_real, allow_negative_numbers = true)]
    pub sigma: f64,
    #[arg(long, default_value_t = 200, value_parser = positive_int)]
    pub starts: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MeanCountArgs {
    #[arg(long, default_value_t = 4, value_parser = positive_int)]
    pub n: usize,
    #[arg(long, default_value_t = 2.0, value_parser = positive_real, allow_negative_numbers = true)]
    pub sigma: f64,
    #[arg(long, default_value_t = 50, value_parser = positive_int)]
    pub matrices: usize,
    #[arg(long, default_value_t = 200, value_parser = positive_int)]
    pub starts: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ComplexityMethod {
    ClosedForm,
    Quadrature,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ComplexityArgs {
    #[arg(long, value_parser = positive_real, allow_negative_numbers = true, conflicts_with = "sigma_list")]
    pub sigma: Option<f64>,
    #[arg(long, value_parser = positive_real_list, allow_negative_numbers = true)]
    pub sigma_list: Option<::std::vec::Vec<f64>>,
    #[arg(long, value_enum, default_value_t = ComplexityMethod::ClosedForm)]
    pub method: ComplexityMethod,
    /// Monte-Carlo points for the quadrature method.
    #[arg(long, default_value_t = 1_000_000, value_parser = at_least_100)]
    pub samples: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct KacRiceArgs {
    #[arg(long, value_parser = positive_real, allow_negative_numbers = true, conflicts_with = "sigma_list")]
    pub sigma: Option<f64>,
    #[arg(long, value_parser = positive_real_list, allow_negative_numbers = true)]
    pub sigma_list: Option<::std::vec::Vec<f64>>,
    #[arg(long, default_value_t = 500, value_parser = at_least_2)]
    pub n: usize,
    #[arg(long, default_value_t = 50, value_parser = at_least_2)]
    pub matrices: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BenettinArgs {
    #[arg(long, default_value_t = 0.01, value_parser = positive_real, allow_negative_numbers = true)]
    pub dt: f64,
    /// Total integration time including the transient.
    #[arg(long, default_value_t = 2000.0, value_parser = positive_real, allow_negative_numbers = true)]
    pub t_end: f64,
    #[arg(long, default_value_t = 200.0, value_parser = positive_real, allow_negative_numbers = true)]
    pub transient: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LyapunovArgs {
    #[arg(long, default_value_t = 200, value_parser = positive_int)]
    pub n: usize,
    #[arg(long, default_value_t = 1.5, value_parser = positive_real, allow_negative_numbers = true)]
    pub sigma: f64,
    #[arg(long, default_value_t = 1, value_parser = positive_int)]
    pub realizations: usize,
    #[command(flatten)]
    pub benettin: BenettinArgs,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LyapunovCurveArgs {
    #[arg(long, default_value_t = 200, value_parser = positive_int)]
    pub n: usize,
    #[arg(long, default_value = "1.05,1.1,1.15,1.2,1.25,1.3", value_parser = positive_real_list, allow_negative_numbers = true)]
    pub sigma_list: ::std::vec::Vec<f64>,
    #[arg(long, default_value_t = 10, value_parser = positive_int)]
    pub realizations: usize,
    #[command(flatten)]
    pub benettin: BenettinArgs,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FakirSlopeArgs {
    #[arg(long, default_value = "5,10,20,40,80", value_parser = positive_int_list)]
    pub k_list: ::std::vec::Vec<usize>,
    #[arg(long, default_value_t = 100, value_parser = at_least_2)]
    pub landscapes: usize,
    #[arg(long, default_value_t = 0.01, value_parser = positive_real, allow_negative_numbers = true)]
    pub dt: f64,
    /// Total integration time including the transient.
    #[arg(long, default_value_t = 2100.0, value_parser = positive_real, allow_negative_numbers = true)]
    pub t_end: f64,
    #[arg(long, default_value_t = 100.0, value_parser = positive_real, allow_negative_numbers = true)]
    pub transient: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EdgeThicknessArgs {
    #[arg(long, default_value_t = 1000, value_parser = positive_int)]
    pub n: usize,
    /// Log-count in nats that marks the edge.
    #[arg(long, default_value_t = 1.0, value_parser = positive_real, allow_negative_numbers = true)]
    pub target: f64,
    #[command(flatten)]
    pub common: Common,
}

fn positive_real(s: &str) -> Result<f64, String> {
    match s.trim().parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        Ok(v) => Err(format!("must be a positive finite number, got {v}")),
        Err(e) => Err(e.to_string()),
    }
}

fn positive_int(s: &str) -> Result<usize, String> {
    match s.trim().parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

fn at_least(s: &str, min: usize) -> Result<usize, String> {
    let v = positive_int(s)?;
    if v < min {
        return Err(format!("must be at least {min}, got {v}"));
    }
    Ok(v)
}

fn at_least_2(s: &str) -> Result<usize, String> {
    at_least(s, 2)
}

fn at_least_100(s: &str) -> Result<usize, String> {
    at_least(s, 100)
}

fn eigen_dim(s: &str) -> Result<usize, String> {
    let v = positive_int(s)?;
    if v > MAX_EIGEN_DIM {
        return Err(format!("must be at most {MAX_EIGEN_DIM}, got {v}"));
    }
    Ok(v)
}

fn positive_real_list(s: &str) -> Result<Vec<f64>, String> {
    let v = parse_real_list(s).map_err(|e| e.to_string())?;
    if let Some(bad) = v.iter().find(|x| **x <= 0.0) {
        return Err(format!("entries must be positive, got {bad}"));
    }
    Ok(v)
}

fn positive_int_list(s: &str) -> Result<Vec<usize>, String> {
    let v = parse_int_list(s).map_err(|e| e.to_string())?;
    if v.contains(&0) {
        return Err("entries must be at least 1".into());
    }
    Ok(v)
}
