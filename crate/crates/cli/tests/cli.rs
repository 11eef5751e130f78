use std::path::Path;
use std::process::{Command, Output};

use edgechaos::randmat::parse_spectrum_csv;
use edgechaos_cli::manifest::sha256_hex;
use edgechaos_cli::svg::{emit_svg, series_from_csv, AxesSpec, Style};
use serde_json::Value;

fn edgechaos(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_edgechaos"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn summary(o: &Output) -> Value {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

#[test]
fn closed_form_complexity_at_two() {
    let dir = tempfile::tempdir().unwrap();
    let s = summary(&edgechaos(&["complexity", "--sigma", "2"], dir.path()));
    let e = &s["result"]["estimates"][0];
    assert_eq!(e["method"], "closed_form");
    assert!((e["value"].as_f64().unwrap() - 0.318147).abs() < 1e-6);
    assert!(s["seeds"].is_array());
}

#[test]
fn mean_count_is_byte_identical_across_runs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["mean-count", "--sigma", "0.5", "--n", "8", "--matrices", "20", "--seed", "7"];
    let sa = summary(&edgechaos(&args, a.path()));
    summary(&edgechaos(&args, b.path()));
    let ca = std::fs::read(a.path().join("counts.csv")).unwrap();
    let cb = std::fs::read(b.path().join("counts.csv")).unwrap();
    assert_eq!(ca, cb);
    assert_eq!(sa["seeds"].as_array().unwrap().len(), 20);
    let text = String::from_utf8(ca).unwrap();
    assert!(text.starts_with("sigma,n,realization,count\n"));
    // unique equilibrium below the transition
    assert!(text.lines().skip(1).all(|l| l.ends_with(",1")));
}

#[test]
fn outputs_do_not_depend_on_worker_count() {
    for args in [
        vec!["mean-count", "--sigma", "2", "--n", "4", "--matrices", "12", "--seed", "3"],
        vec!["kac-rice", "--sigma-list", "0.5,2", "--n", "40", "--matrices", "8", "--seed", "3"],
        vec![
            "lyapunov-curve", "--sigma-list", "1.5,3", "--n", "20", "--realizations", "3", "--t-end", "40",
            "--transient", "10", "--seed", "3",
        ],
        vec![
            "fakir-slope", "--k-list", "5,10", "--landscapes", "3", "--t-end", "30", "--transient", "5", "--seed",
            "3",
        ],
    ] {
        let one = tempfile::tempdir().unwrap();
        let four = tempfile::tempdir().unwrap();
        let mut a = args.clone();
        a.extend(["--threads", "1"]);
        let mut b = args.clone();
        b.extend(["--threads", "4"]);
        let sa = summary(&edgechaos(&a, one.path()));
        let sb = summary(&edgechaos(&b, four.path()));
        assert_eq!(sa["result"], sb["result"], "{}", args[0]);
        for f in sa["outputs"].as_array().unwrap() {
            let name = f.as_str().unwrap();
            assert_eq!(
                std::fs::read(one.path().join(name)).unwrap(),
                std::fs::read(four.path().join(name)).unwrap(),
                "{name}"
            );
        }
    }
}

#[test]
fn spectrum_has_n_rows_and_is_conjugate_closed() {
    let dir = tempfile::tempdir().unwrap();
    summary(&edgechaos(&["spectrum", "--n", "500", "--sigma", "1.5", "--seed", "1"], dir.path()));
    let text = std::fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    assert!(text.starts_with("re,im\n"));
    let eig = parse_spectrum_csv(&text).unwrap();
    assert_eq!(eig.len(), 500);
    for z in &eig {
        let best = eig.iter().map(|w| (w - z.conj()).norm()).fold(f64::INFINITY, f64::min);
        assert!(best <= 1e-10 * (1.0 + z.norm()), "{z}");
    }
}

#[test]
fn manifest_digests_match_files() {
    let dir = tempfile::tempdir().unwrap();
    let s = summary(&edgechaos(
        &["fakir-slope", "--k-list", "5,10", "--landscapes", "2", "--t-end", "20", "--transient", "5", "--svg"],
        dir.path(),
    ));
    let manifest: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "fakir-slope");
    assert_eq!(manifest["seeds"], s["seeds"]);
    assert_eq!(manifest["config"]["landscapes"], 2);
    let outputs = manifest["outputs"].as_array().unwrap();
    assert_eq!(outputs.len(), 4);
    for f in outputs {
        let bytes = std::fs::read(dir.path().join(f["path"].as_str().unwrap())).unwrap();
        assert_eq!(f["sha256"].as_str().unwrap(), sha256_hex(&bytes));
        assert_eq!(f["bytes"].as_u64().unwrap() as usize, bytes.len());
    }
    let reg: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("regression.json")).unwrap()).unwrap();
    assert!(reg["slope"].is_f64() && reg["intercept"].is_f64() && reg["r2"].is_f64());
    roxmltree::Document::parse(&std::fs::read_to_string(dir.path().join("fakir.svg")).unwrap()).unwrap();
}

#[test]
fn lyapunov_curve_csv_renders_as_valid_svg() {
    let dir = tempfile::tempdir().unwrap();
    let s = summary(&edgechaos(
        &[
            "lyapunov-curve", "--sigma-list", "1.5,2,3", "--n", "30", "--realizations", "2", "--t-end", "60",
            "--transient", "10", "--svg",
        ],
        dir.path(),
    ));
    assert_eq!(s["seeds"].as_array().unwrap().len(), 6);
    let text = std::fs::read_to_string(dir.path().join("lyapunov.csv")).unwrap();
    assert!(text.starts_with("sigma,n,realization,lambda,convention\n"));
    let series = series_from_csv(&text, "sigma", "lambda", Some("convention"), Style::Markers).unwrap();
    assert_eq!(series.len(), 2);
    let path = dir.path().join("piped.svg");
    emit_svg(&series, &AxesSpec::linear("sigma", "lambda"), &path).unwrap();
    for name in ["piped.svg", "lyapunov.svg"] {
        let svg = std::fs::read_to_string(dir.path().join(name)).unwrap();
        let doc = roxmltree::Document::parse(&svg).unwrap();
        assert_eq!(doc.root_element().tag_name().name(), "svg");
    }
}

#[test]
fn json_format_writes_json_tables() {
    let dir = tempfile::tempdir().unwrap();
    summary(&edgechaos(&["edge-thickness", "--n", "100", "--format", "json"], dir.path()));
    let v: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("edge_thickness.json")).unwrap()).unwrap();
    assert!((v[0]["sigma"].as_f64().unwrap() - 1.1).abs() < 1e-12);
}

#[test]
fn every_subcommand_reports_seeds() {
    let runs: [&[&str]; 6] = [
        &["spectrum", "--n", "20"],
        &["trajectory", "--n", "10", "--t-end", "1"],
        &["equilibria", "--n", "3", "--starts", "20"],
        &["complexity", "--sigma-list", "1.5,2", "--method", "quadrature", "--samples", "1000"],
        &["lyapunov", "--n", "10", "--t-end", "30", "--transient", "5"],
        &["edge-thickness"],
    ];
    for args in runs {
        let dir = tempfile::tempdir().unwrap();
        let s = summary(&edgechaos(args, dir.path()));
        assert!(s["seeds"].is_array(), "{}", args[0]);
        assert!(dir.path().join("manifest.json").exists());
    }
}

#[test]
fn usage_errors_exit_with_one_and_name_the_flag() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [(&[&str], &str); 6] = [
        (&["spectrum", "--bogus", "1"], "--bogus"),
        (&["mean-count", "--n", "0"], "--n"),
        (&["kac-rice", "--sigma", "-1"], "--sigma"),
        (&["fakir-slope", "--k-list", "10,5"], "--k-list"),
        (&["lyapunov", "--t-end", "10", "--transient", "20"], "--t-end"),
        (&["mean-count", "--svg"], "--svg"),
    ];
    for (args, flag) in cases {
        let o = edgechaos(args, dir.path());
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        let err = String::from_utf8_lossy(&o.stderr);
        assert!(err.contains(flag), "{args:?}: {err}");
    }
    let o = edgechaos(&["no-such-command"], dir.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn numerical_failure_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    // far beyond the RK4 stability limit for the leak term
    let o = edgechaos(&["trajectory", "--n", "5", "--dt", "100", "--t-end", "100000"], dir.path());
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("non-finite"));
}
