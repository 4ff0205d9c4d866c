use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tcl_discord::cli::{self, CSV_HEADER, SWEEP_HEADER};

fn bin(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tcl-discord"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

const FIG1A: &str = "initial_state = \"psi\"
lambda = 5.0
delta = 0.0
theta = 0.0
t_max = 5.0
csv_path = \"out.csv\"
events_path = \"out.events.toml\"
svg_path = \"out.svg\"
";

#[test]
fn simulate_writes_all_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.toml", FIG1A);
    let out = bin(&["simulate", &cfg], dir.path());
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let csv = fs::read_to_string(dir.path().join("out.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some(CSV_HEADER));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(&first[..3], &["0", "1", "1"]);
    assert_eq!(csv.lines().count(), 5002);
    assert!(!csv.contains('\r'));
    for line in csv.lines().skip(1) {
        let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(v.len(), 6);
        assert!(v[4].abs() < 1e-9 && v[5] > -1e-4, "{line}");
    }

    let events: toml::Value =
        toml::from_str(&fs::read_to_string(dir.path().join("out.events.toml")).unwrap()).unwrap();
    let t_cri = events["t_cri"].as_float().unwrap();
    assert!((t_cri - 0.32).abs() < 0.05);
    assert!(events.get("t_esd").is_none());
    assert!(!events["crossings"].as_array().unwrap().is_empty());

    let svg = fs::read_to_string(dir.path().join("out.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains("γ₀t") && svg.contains("correlation"));
    assert!(svg.contains("stroke-dasharray"));
}

#[test]
fn fig1c_event_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "run.toml",
        &FIG1A.replace("theta = 0.0", "theta = 1.0"),
    );
    let out = bin(&["simulate", &cfg], dir.path());
    assert!(out.status.success());
    let events: toml::Value =
        toml::from_str(&fs::read_to_string(dir.path().join("out.events.toml")).unwrap()).unwrap();
    let t_esd = events["t_esd"].as_float().unwrap();
    assert!((t_esd - 0.73).abs() <= 0.073, "{t_esd}");
}

#[test]
fn negative_lambda_is_config_error_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "bad.toml",
        &FIG1A.replace("lambda = 5.0", "lambda = -1.0"),
    );
    let out = bin(&["simulate", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    let names: Vec<_> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    assert_eq!(names, vec!["bad.toml"]);
}

#[test]
fn unknown_key_is_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.toml", &format!("{FIG1A}gamma0 = 2.0\n"));
    assert_eq!(bin(&["simulate", &cfg], dir.path()).status.code(), Some(2));
}

#[test]
fn missing_config_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        bin(&["simulate", "nope.toml"], dir.path()).status.code(),
        Some(4)
    );
}

#[test]
fn unwritable_output_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "run.toml",
        &FIG1A
            .replace("t_max = 5.0", "t_max = 0.1")
            .replace("out.csv", "missing/dir/out.csv"),
    );
    assert_eq!(bin(&["simulate", &cfg], dir.path()).status.code(), Some(4));
}

#[test]
fn runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for sub in ["a", "b"] {
        let out = bin(&["figure", "fig1a", "--out-dir", sub], dir.path());
        assert!(out.status.success());
        outputs.push(fs::read(dir.path().join(sub).join("fig1a.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn figure_reports_checks() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin(&["figure", "fig2a"], dir.path());
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("PASS fig2a t_cri"), "{text}");
    assert_eq!(bin(&["figure", "fig9z"], dir.path()).status.code(), Some(2));
}

#[test]
fn sweep_rows_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "base.toml",
        &FIG1A.replace("t_max = 5.0", "t_max = 1.0"),
    );
    let out = bin(
        &[
            "sweep",
            &cfg,
            "--vary",
            "delta",
            "--values",
            "0,1,4",
            "--output",
            "sweep.csv",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let table = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines[0], SWEEP_HEADER);
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("0,") && lines[3].starts_with("4,"));

    // one bad row: table still written, exit 0
    let out = bin(
        &["sweep", &cfg, "--vary", "lambda", "--values", "5,-1"],
        dir.path(),
    );
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    let bad = stdout.lines().nth(2).unwrap();
    assert!(bad.starts_with("-1,,,,,\""), "{bad}");

    // every row bad
    let out = bin(
        &["sweep", &cfg, "--vary", "lambda", "--values", "-1,-2"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(3));

    let out = bin(
        &["sweep", &cfg, "--vary", "gamma", "--values", "1"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn lambda_sweep_orders_crossover() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "base.toml",
        "initial_state = \"psi\"\nlambda = 0.1\ndelta = 1.0\ntheta = 0.0\nt_max = 60.0\nsample_stride = 10\noracle_audit_stride = 0\n",
    );
    let out = bin(
        &["sweep", &cfg, "--vary", "lambda", "--values", "0.01,0.1,5"],
        dir.path(),
    );
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let t: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| {
            l.split(',')
                .nth(1)
                .unwrap()
                .parse()
                .unwrap_or(f64::INFINITY)
        })
        .collect();
    assert!(t[0] > t[1] && t[1] > t[2], "{t:?}");
}

#[test]
fn custom_x_config() {
    let cfg = cli::RunConfig::parse(
        "initial_state = \"custom_x\"\nx_populations = [0.5, 0.0, 0.0, 0.5]\nx_coherence_14 = [0.5, 0.0]\nlambda = 5\ndelta = 0\ntheta = 0\nt_max = 0.5\n",
    )
    .unwrap();
    let out = cli::simulate(&cfg).unwrap();
    assert!((out.series.e[0] - 1.0).abs() < 1e-12);
}
