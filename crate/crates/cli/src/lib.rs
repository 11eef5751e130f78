//! Batch experiment runner. Every subcommand writes its data tables and a
//! `manifest.json` into `--out`, and prints a JSON summary on stdout.
//!
//! Exit codes: 0 on success, 1 on usage errors (unknown flags, out-of-range
//! values), 2 when a computation or an output write fails.

pub mod args;
pub mod manifest;
pub mod svg;

use std::ffi::OsString;
use std::fmt;

use chrono::Utc;
use clap::error::ErrorKind;
use clap::Parser;
use nalgebra::DVector;
use rayon::prelude::*;
use serde_json::{json, Value};

use edgechaos::complexity::{c_closed_form, c_quadrature, closed_form_estimate, edge_thickness, estimates_to_csv, kac_rice_mc};
use edgechaos::equilibria::{find_equilibria, mean_count, SearchOptions};
use edgechaos::fakir::{slope_experiment, FakirLyapunovParams, FakirParams, REFERENCE_SLOPE};
use edgechaos::io::{fmt_real, CsvTable};
use edgechaos::lyapunov::{curve_to_csv, fit_power_law, lyapunov_curve, BenettinParams, Convention, CurveParams, CurvePoint};
use edgechaos::netmodel::{integrate, IntegrateOptions};
use edgechaos::randmat::{circular_law_discrepancy, matrix_spectrum};
use edgechaos::rng::{derive_seed, SeedStream};
use edgechaos::{ConnectivityMatrix, SigmoidSpec};

use args::{BenettinArgs, Cli, Command, ComplexityMethod, Format};
use manifest::{timestamp, OutputDir, RunManifest};
use svg::{AxesSpec, Series, Style};

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Usage(String),
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Failure(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Failure(m) => f.write_str(m),
        }
    }
}

/// Flag that feeds a library parameter of the given name.
fn flag_for(name: &str) -> String {
    let flag = match name {
        "n_matrices" => "matrices",
        "n_points" => "samples",
        "n_landscapes" => "landscapes",
        "n_realizations" => "realizations",
        "n_starts" => "starts",
        "t_total" => "t-end",
        "target_nats" => "target",
        other => return format!("--{}", other.replace('_', "-")),
    };
    format!("--{flag}")
}

impl From<edgechaos::Error> for CliError {
    fn from(e: edgechaos::Error) -> Self {
        use edgechaos::Error::*;
        match e {
            InvalidParameter { name, reason } => CliError::Usage(format!("invalid value for {}: {reason}", flag_for(name))),
            DimensionMismatch { .. } | Parse { .. } => CliError::Usage(e.to_string()),
            NonFinite { .. } | EigenConvergence { .. } | Overflow { .. } | Io(_) => CliError::Failure(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Failure(format!("i/o error: {e}"))
    }
}

fn usage(flag: &str, reason: impl fmt::Display) -> CliError {
    CliError::Usage(format!("invalid value for {flag}: {reason}"))
}

/// Seeds and summary produced by one subcommand.
struct Outcome {
    seeds: Vec<u64>,
    result: Value,
}

/// Parse `argv` (including the program name), run, and return the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    match execute(&cli.command) {
        Ok(summary) => {
            println!("{}", serde_json::to_string_pretty(&summary).unwrap_or_default());
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Run a parsed command and return the stdout summary.
pub fn execute(cmd: &Command) -> Result<Value, CliError> {
    let started = Utc::now();
    let common = cmd.common();
    if common.svg && !matches!(
        cmd,
        Command::Spectrum(_) | Command::Trajectory(_) | Command::Complexity(_) | Command::KacRice(_)
            | Command::LyapunovCurve(_) | Command::FakirSlope(_)
    ) {
        return Err(usage("--svg", format!("not supported by `{}`", cmd.name())));
    }
    let mut out = OutputDir::create(&common.out)?;
    let outcome = match common.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| CliError::Failure(e.to_string()))?
            .install(|| dispatch(cmd, &mut out))?,
        None => dispatch(cmd, &mut out)?,
    };
    let outputs: Vec<String> = out.files().iter().map(|f| f.path.clone()).collect();
    let manifest = RunManifest {
        command: cmd.name().to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: cmd.config(),
        started: timestamp(started),
        finished: timestamp(Utc::now()),
        seeds: outcome.seeds.clone(),
        outputs: out.files().to_vec(),
    };
    out.finish(&manifest)?;
    Ok(json!({
        "command": cmd.name(),
        "seed": common.seed,
        "seeds": outcome.seeds,
        "outputs": outputs,
        "result": outcome.result,
    }))
}

fn dispatch(cmd: &Command, out: &mut OutputDir) -> Result<Outcome, CliError> {
    match cmd {
        Command::Spectrum(a) => spectrum(a, out),
        Command::Trajectory(a) => trajectory(a, out),
        Command::Equilibria(a) => equilibria(a, out),
        Command::MeanCount(a) => mean_count_cmd(a, out),
        Command::Complexity(a) => complexity(a, out),
        Command::KacRice(a) => kac_rice(a, out),
        Command::Lyapunov(a) => lyapunov(a, out),
        Command::LyapunovCurve(a) => lyapunov_curve_cmd(a, out),
        Command::FakirSlope(a) => fakir_slope(a, out),
        Command::EdgeThickness(a) => edge(a, out),
    }
}

fn write_table(out: &mut OutputDir, stem: &str, table: &CsvTable, format: Format) -> Result<(), CliError> {
    let text = match format {
        Format::Csv => table.render(),
        Format::Json => table.render_json(),
    };
    out.write(&format!("{stem}.{}", format.extension()), &text)?;
    Ok(())
}

fn write_svg(out: &mut OutputDir, stem: &str, series: &[Series], axes: &AxesSpec) -> Result<(), CliError> {
    let text = svg::render_svg(series, axes)?;
    out.write(&format!("{stem}.svg"), &text)?;
    Ok(())
}

fn spectrum(a: &args::SpectrumArgs, out: &mut OutputDir) -> Result<Outcome, CliError> {
    let matrix_seed = derive_seed(a.common.seed, 0);
    let j = ConnectivityMatrix::sample(a.n, a.sigma, matrix_seed)?;
    let sp = matrix_spectrum(&j)?;
    write_table(out, "spectrum", &sp.to_csv(), a.common.format)?;
    if a.common.svg {
        let pts = sp.eigenvalues.iter().map(|z| (z.re, z.im)).collect();
        let axes = AxesSpec::linear("Re", "Im").with_title(format!("spectrum, n = {}, sigma = {}", a.n, a.sigma));
        write_svg(out, "spectrum", &[Series::new("eigenvalues", pts, Style::Markers)], &axes)?;
    }
    Ok(Outcome {
        seeds: vec![matrix_seed],
        result: json!({
            "n": a.n,
            "sigma": a.sigma,
            "radius": sp.radius(),
            "support_radius": a.sigma,
            "max_real_part": sp.max_real_part(),
            "circular_law_ks": circular_law_discrepancy(&sp, a.sigma),
        }),
    })
}

fn uniform_state(n: usize, seed: u64) -> DVector<f64> {
    let mut rng = SeedStream::new(seed);
    DVector::from_fn(n, |_, _| rng.uniform_in(-1.0, 1.0))
}

fn trajectory(a: &args::TrajectoryArgs, out: &mut OutputDir) -> Result<Outcome, CliError> {
    let seeds = vec![derive_seed(a.common.seed, 0), derive_seed(a.common.seed, 1)];
    let j = ConnectivityMatrix::sample(a.n, a.sigma, seeds[0])?;
    let x0 = uniform_state(a.n, seeds[1]);
    let opts = IntegrateOptions {
        dt: a.dt,
        t_end: a.t_end,
        store_every: a.store_every,
    };
    let traj = integrate(&j, &SigmoidSpec::tanh(), &x0, &opts)?;
    let mut header = vec!["t".to_string()];
    header.extend((0..a.n).map(|i| format!("x{i}")));
    let mut table = CsvTable::new(&header);
    for (t, x) in traj.times.iter().zip(&traj.states) {
        let mut row = vec![fmt_real(*t)];
        row.extend(x.iter().map(|v| fmt_real(*v)));
        table.push(row);
    }
    write_table(out, "trajectory", &table, a.common.format)?;
    if a.common.svg {
        let series: Vec<Series> = (0..a.n.min(5))
            .map(|i| {
                let pts = traj.times.iter().zip(&traj.states).map(|(t, x)| (*t, x[i])).collect();
                Series::new(format!("x{i}"), pts, Style::Line)
            })
            .collect();
        write_svg(out, "trajectory", &series, &AxesSpec::linear("t", "x_i"))?;
    }
    let last = traj.final_state();
    Ok(Outcome {
        seeds,
        result: json!({
            "n": a.n,
            "sigma": a.sigma,
            "method": traj.method,
            "dt": traj.dt,
            "stored": traj.len(),
            "t_final": last.t,
            "rms_final": last.x.norm() / (a.n as f64).sqrt(),
        }),
    })
}

fn equilibria(a: &args::EquilibriaArgs, out: &mut OutputDir) -> Result<Outcome, CliError> {
    let seeds = vec![derive_seed(a.common.seed, 0), derive_seed(a.common.seed, 1)];
    let j = ConnectivityMatrix::sample(a.n, a.sigma, seeds[0])?;
    let set = find_equilibria(&j, &SigmoidSpec::tanh(), &SearchOptions::new(a.starts, seeds[1]))?;
    let mut header: Vec<String> = ["index", "unstable_dims", "residual", "norm"].iter().map(|s| s.to_string()).collect();
    header.extend((0..a.n).map(|i| format!("x{i}")));
    let mut table = CsvTable::new(&header);
    for (i, r) in set.roots.iter().enumerate() {
        let mut row = vec![
            i.to_string(),
            r.unstable_dims.map(|k| k.to_string()).unwrap_or_default(),
            fmt_real(r.residual),
            fmt_real(r.x.norm()),
        ];
        row.extend(r.x.iter().map(|v| fmt_real(*v)));
        table.push(row);
    }
    write_table(out, "equilibria", &table, a.common.format)?;
    let stable = set.roots.iter().filter(|r| r.is_stable() == Some(true)).count();
    Ok(Outcome {
        seeds,
        result: json!({
            "n": a.n,
            "sigma": a.sigma,
            "count": set.count(),
            "stable": stable,
            "search": set.search,
        }),
    })
}

fn mean_count_cmd(a: &args::MeanCountArgs, out: &mut OutputDir) -> Result<Outcome, CliError> {
    let est = mean_count(a.sigma, a.n, a.matrices, a.starts, a.common.seed)?;
    write_table(out, "counts", &est.to_csv(), a.common.format)?;
    Ok(Outcome {
        seeds: est.seeds.clone(),
        result: json!({
            "n": a.n,
            "sigma": a.sigma,
            "mean": est.mean,
            "stderr": est.stderr,
            "counts": est.counts,
            "search": est.search,
        }),
    })
}

fn sigma_values(sigma: Option<f64>, list: &Option<Vec<f64>>, default: &[f64]) -> Vec<f64> {
    match (sigma, list) {
        (Some(s), _) => vec![s],
        (None, Some(l)) => l.clone(),
        (None, None) => default.to_vec(),
    }
}

fn complexity(a: &args::ComplexityArgs, out: &mut OutputDir) -> Result<Outcome, CliError> {
    let sigmas = sigma_values(a.sigma, &a.sigma_list, &[2.0]);
    let (estimates, seeds) = match a.method {
        ComplexityMethod::ClosedForm => (sigmas.iter().map(|s| closed_form_estimate(*s)).collect::<Vec<_>>(), vec![]),
        ComplexityMethod::Quadrature => {
            let seeds: Vec<u64> = (0..sigmas.len() as u64).map(|i| derive_seed(a.common.seed, i)).collect();
            let est = sigmas
                .par_iter()
                .zip(&seeds)
                .map(|(s, seed)| c_quadrature(*s, a.samples, *seed))
                .collect::<edgechaos::Result<Vec<_>>>()?;
            (est, seeds)
        }
    };
    write_table(out, "complexity", &estimates_to_csv(&estimates), a.common.format)?;
    if a.common.svg {
        let pts = estimates.iter().map(|e| (e.sigma, e.value)).collect();
        write_svg(out, "complexity", &[Series::new("c(sigma)", pts, Style::LineMarkers)], &AxesSpec::linear("sigma", "c"))?;
    }
    Ok(Outcome {
        seeds,
        result: json!({ "estimates": estimates }),
    })
}

fn kac_rice(a: &args::KacRiceArgs, out: &mut OutputDir) -> Result<Outcome, CliError> {
    let sigmas = sigma_values(a.sigma, &a.sigma_list, &[0.5, 1.5, 2.0]);
    let mut estimates = Vec::with_capacity(sigmas.len());
    let mut seeds = Vec::new();
    for (i, sigma) in sigmas.iter().enumerate() {
        let ensemble = derive_seed(a.common.seed, i as u64);
        seeds.extend((0..a.matrices as u64).map(|m| derive_seed(ensemble, m)));
        estimates.push(kac_rice_mc(a.n, *sigma, a.matrices, ensemble)?);
    }
    write_table(out, "complexity", &estimates_to_csv(&estimates), a.common.format)?;
    if a.common.svg {
        let mc = estimates.iter().map(|e| (e.sigma, e.value)).collect();
        let exact = sigmas.iter().map(|s| (*s, c_closed_form(*s))).collect();
        write_svg(
            out,
            "complexity",
            &[
                Series::new("log-det mean", mc, Style::Markers),
                Series::new("closed form", exact, Style::Line),
            ],
            &AxesSpec::linear("sigma", "c"),
        )?;
    }
    let rows: Vec<Value> = estimates
        .iter()
        .map(|e| {
            json!({
                "sigma": e.sigma,
                "n": e.n,
                "value": e.value,
                "stderr": e.stderr,
                "method": e.method,
                "closed_form": c_closed_form(e.sigma),
                "singular_excluded": e.singular_excluded,
            })
        })
        .collect();
    Ok(Outcome {
        seeds,
        result: json!({ "estimates": rows }),
    })
}

fn curve_params(b: &BenettinArgs) -> Result<CurveParams, CliError> {
    if b.t_end <= b.transient {
        return Err(usage("--t-end", format!("must exceed --transient ({})", b.transient)));
    }
    if b.dt > 1.0 {
        return Err(usage("--dt", "must not exceed the renormalization interval 1"));
    }
    Ok(CurveParams {
        benettin: BenettinParams {
            dt: b.dt,
            transient: b.transient,
            t_total: b.t_end,
            renorm_every: 1.0,
        },
        sigmoid: SigmoidSpec::tanh(),
    })
}

fn curve_json(p: &CurvePoint) -> Value {
    json!({
        "sigma": p.sigma,
        "n": p.n,
        "lambda": p.mean,
        "stderr": p.stderr,
        "lambda_susceptibility": p.mean * 2.0,
        "lambdas": p.lambdas,
    })
}

fn lyapunov(a: &args::LyapunovArgs, out: &mut OutputDir) -> Result<Outcome, CliError> {
    let params = curve_params(&a.benettin)?;
    let points = lyapunov_curve(&[a.sigma], a.n, a.realizations, &params, a.common.seed)?;
    write_table(out, "lyapunov", &curve_to_csv(&points), a.common.format)?;
    Ok(Outcome {
        seeds: points[0].seeds.clone(),
        result: json!({ "convention": Convention::Benettin, "point": curve_json(&points[0]) }),
    })
}

fn lyapunov_curve_cmd(a: &args::LyapunovCurveArgs, out: &mut OutputDir) -> Result<Outcome, CliError> {
    let params = curve_params(&a.benettin)?;
    let points = lyapunov_curve(&a.sigma_list, a.n, a.realizations, &params, a.common.seed)?;
    write_table(out, "lyapunov", &curve_to_csv(&points), a.common.format)?;
    if a.common.svg {
        let pts = points.iter().map(|p| (p.sigma, p.mean)).collect();
        write_svg(
            out,
            "lyapunov",
            &[Series::new("mean lambda", pts, Style::LineMarkers)],
            &AxesSpec::linear("sigma", "lambda").with_title(format!("n = {}", a.n)),
        )?;
    }
    let above: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.sigma > 1.0 && p.mean > 0.0)
        .map(|p| (p.sigma - 1.0, p.mean))
        .collect();
    let fit = fit_power_law(&above).ok();
    Ok(Outcome {
        seeds: points.iter().flat_map(|p| p.seeds.iter().copied()).collect(),
        result: json!({
            "convention": Convention::Benettin,
            "points": points.iter().map(curve_json).collect::<Vec<_>>(),
            "power_law": fit,
        }),
    })
}

fn fakir_slope(a: &args::FakirSlopeArgs, out: &mut OutputDir) -> Result<Outcome, CliError> {
    if a.k_list.len() < 2 {
        return Err(usage("--k-list", "need at least two hill counts"));
    }
    if a.k_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(usage("--k-list", "must be strictly increasing"));
    }
    if a.t_end <= a.transient {
        return Err(usage("--t-end", format!("must exceed --transient ({})", a.transient)));
    }
    let lyap = FakirLyapunovParams {
        dt: a.dt,
        transient: a.transient,
        t_total: a.t_end,
        renorm_every: 1.0f64.max(a.dt),
    };
    let res = slope_experiment(&a.k_list, a.landscapes, &FakirParams::default(), &lyap, a.common.seed)?;
    write_table(out, "fakir", &res.to_csv(), a.common.format)?;
    write_table(out, "fakir_summary", &res.summary_csv(), a.common.format)?;
    out.write("regression.json", &res.regression_json())?;
    if a.common.svg {
        let means = res.per_k.iter().map(|s| (s.k as f64, s.mean)).collect();
        let line = res
            .per_k
            .iter()
            .map(|s| (s.k as f64, res.fit.intercept + res.fit.slope * (s.k as f64).ln()))
            .collect();
        write_svg(
            out,
            "fakir",
            &[
                Series::new("mean lambda", means, Style::Markers),
                Series::new(format!("fit, slope {:.3}", res.fit.slope), line, Style::Line),
            ],
            &AxesSpec::semilog_x("hills k", "lambda"),
        )?;
    }
    let per_k: Vec<Value> = res
        .per_k
        .iter()
        .map(|s| json!({ "k": s.k, "mean": s.mean, "stderr": s.stderr }))
        .collect();
    Ok(Outcome {
        seeds: res.per_k.iter().flat_map(|s| s.landscape_seeds.iter().copied()).collect(),
        result: json!({
            "slope": res.fit.slope,
            "intercept": res.fit.intercept,
            "r2": res.fit.r2,
            "reference_slope": REFERENCE_SLOPE,
            "per_k": per_k,
        }),
    })
}

fn edge(a: &args::EdgeThicknessArgs, out: &mut OutputDir) -> Result<Outcome, CliError> {
    let sigma = edge_thickness(a.n, a.target)?;
    let mut table = CsvTable::new(&["n", "target", "sigma", "delta"]);
    table.push(vec![a.n.to_string(), fmt_real(a.target), fmt_real(sigma), fmt_real(sigma - 1.0)]);
    write_table(out, "edge_thickness", &table, a.common.format)?;
    Ok(Outcome {
        seeds: vec![],
        result: json!({ "n": a.n, "target": a.target, "sigma": sigma, "delta": sigma - 1.0 }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn library_errors_name_flags() {
        let e: CliError = edgechaos::Error::InvalidParameter {
            name: "n_matrices",
            reason: "x".into(),
        }
        .into();
        assert_eq!(e.exit_code(), 1);
        assert!(e.to_string().contains("--matrices"));
        let e: CliError = edgechaos::Error::NonFinite { time: 1.0 }.into();
        assert_eq!(e.exit_code(), 2);
        assert_eq!(flag_for("sigma_list"), "--sigma-list");
    }
}
