//! Command-line front end: run configurations, figure presets, CSV/event/SVG
//! emission and the sweep table.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::{
    self, AnalysisError, Direction, EventReport, MeasureSeries, RunOutcome, Scenario,
    SweepParameter,
};
use crate::dynamics::{self, InitialState, IntegrationError, IntegratorConfig, XState};
use crate::qmat::C64;
use crate::reservoir::ReservoirParams;

pub const CSV_HEADER: &str = "t_gamma0,discord,eof,concurrence,trace_error,min_eigenvalue";
pub const SWEEP_HEADER: &str = "value,t_cri,t_esd,final_discord,final_eof,error";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical abort: {0}")]
    Numerical(String),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io { .. } => 4,
        }
    }

    fn io(path: &Path, source: io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Integration(IntegrationError::InvalidConfig { .. })
            | AnalysisError::Integration(IntegrationError::InitialState(_))
            | AnalysisError::Integration(IntegrationError::Reservoir(_))
            | AnalysisError::InvalidThreshold(_) => CliError::Config(e.to_string()),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateKind {
    Psi,
    Phi,
    CustomX,
}

fn default_omega0() -> f64 {
    10.0
}
fn default_dt() -> f64 {
    1e-3
}
fn default_esd_threshold() -> f64 {
    analysis::DEFAULT_ESD_THRESHOLD
}
fn default_audit_stride() -> usize {
    analysis::DEFAULT_AUDIT_STRIDE
}

/// One simulation run, read from a flat TOML file.
///
/// ```toml
/// initial_state = "psi"      # psi | phi | custom_x
/// lambda = 5.0
/// delta = 0.0
/// theta = 0.0
/// t_max = 5.0
/// csv_path = "fig1a.csv"
/// ```
///
/// `custom_x` additionally needs `x_populations = [p11, p10, p01, p00]` and
/// optionally `x_coherence_14 = [re, im]`, `x_coherence_23 = [re, im]`.
/// `oracle_audit_stride = 0` disables the oracle audit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub initial_state: StateKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_populations: Option<[f64; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_coherence_14: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_coherence_23: Option<[f64; 2]>,
    pub lambda: f64,
    pub delta: f64,
    #[serde(default = "default_omega0")]
    pub omega0: f64,
    pub theta: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    pub t_max: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_stride: Option<usize>,
    #[serde(default = "default_esd_threshold")]
    pub esd_threshold: f64,
    #[serde(default = "default_audit_stride")]
    pub oracle_audit_stride: usize,
    #[serde(default)]
    pub richardson_check: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv_path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub events_path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub svg_path: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(initial_state: StateKind, lambda: f64, delta: f64, theta: f64, t_max: f64) -> Self {
        Self {
            initial_state,
            x_populations: None,
            x_coherence_14: None,
            x_coherence_23: None,
            lambda,
            delta,
            omega0: default_omega0(),
            theta,
            dt: default_dt(),
            t_max,
            sample_stride: None,
            esd_threshold: default_esd_threshold(),
            oracle_audit_stride: default_audit_stride(),
            richardson_check: false,
            csv_path: None,
            events_path: None,
            svg_path: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.message().to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text)
    }

    fn initial(&self) -> Result<InitialState, CliError> {
        let has_x = self.x_populations.is_some()
            || self.x_coherence_14.is_some()
            || self.x_coherence_23.is_some();
        match self.initial_state {
            StateKind::Psi | StateKind::Phi if has_x => Err(CliError::Config(
                "x_populations / x_coherence_* are only valid with initial_state = \"custom_x\""
                    .into(),
            )),
            StateKind::Psi => Ok(InitialState::Psi),
            StateKind::Phi => Ok(InitialState::Phi),
            StateKind::CustomX => {
                let populations = self
                    .x_populations
                    .ok_or_else(|| CliError::Config("custom_x requires x_populations".into()))?;
                let c =
                    |v: Option<[f64; 2]>| v.map_or(C64::new(0.0, 0.0), |[re, im]| C64::new(re, im));
                Ok(InitialState::CustomX(XState {
                    populations,
                    coherence_14: c(self.x_coherence_14),
                    coherence_23: c(self.x_coherence_23),
                }))
            }
        }
    }

    /// Resolve and fully validate, without running anything.
    pub fn scenario(&self) -> Result<Scenario, CliError> {
        let initial = self.initial()?;
        dynamics::initial_density(&initial)
            .map_err(|e| CliError::Config(format!("invalid initial state: {e}")))?;
        let params = ReservoirParams::new(self.lambda, self.delta, self.omega0, self.theta)
            .map_err(|e| CliError::Config(e.to_string()))?;
        let integrator = IntegratorConfig {
            dt: self.dt,
            t_max: self.t_max,
            sample_stride: self.sample_stride,
            richardson_check: self.richardson_check,
        };
        integrator
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        if !(self.esd_threshold.is_finite() && self.esd_threshold > 0.0) {
            return Err(CliError::Config(format!(
                "esd_threshold must be positive, got {}",
                self.esd_threshold
            )));
        }
        Ok(Scenario {
            initial,
            params,
            integrator,
            esd_threshold: self.esd_threshold,
            audit_stride: (self.oracle_audit_stride > 0).then_some(self.oracle_audit_stride),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpectedEvents {
    pub t_cri: Option<f64>,
    pub t_esd: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigurePreset {
    pub id: &'static str,
    pub config: RunConfig,
    pub expected: Option<ExpectedEvents>,
}

/// Allowed deviation from a plot-read value.
pub fn event_tolerance(value: f64) -> f64 {
    (0.1 * value.abs()).max(0.05)
}

pub const FIGURE_IDS: [&str; 24] = [
    "fig1a", "fig1b", "fig1c", "fig1d", "fig2a", "fig2b", "fig2c", "fig2d", "fig3a", "fig3b",
    "fig3c", "fig3d", "fig4a", "fig4b", "fig4c", "fig4d", "fig5a", "fig5b", "fig5c", "fig5d",
    "fig6a", "fig6b", "fig6c", "fig6d",
];

pub fn figure_preset(id: &str) -> Option<FigurePreset> {
    let id = *FIGURE_IDS.iter().find(|&&f| f == id)?;
    let bytes = id.as_bytes();
    let fig = bytes[3] - b'0';
    let panel = bytes[4];
    let (lambda, delta, t_max, stride) = match fig {
        1 | 3 => (5.0, if fig == 1 { 0.0 } else { 1.0 }, 5.0, None),
        2 => (0.1, 0.0, 10.0, None),
        4 => (0.1, 1.0, 60.0, Some(10)),
        5 => (0.1, 4.0, 200.0, Some(50)),
        6 => (0.01, 1.0, 200.0, Some(50)),
        _ => unreachable!(),
    };
    let state = if panel == b'a' || panel == b'c' {
        StateKind::Psi
    } else {
        StateKind::Phi
    };
    let theta = if panel == b'a' || panel == b'b' {
        0.0
    } else {
        1.0
    };
    let mut config = RunConfig::new(state, lambda, delta, theta, t_max);
    config.sample_stride = stride;
    let ev = |t_cri, t_esd| Some(ExpectedEvents { t_cri, t_esd });
    let expected = match id {
        "fig1a" => ev(Some(0.32), None),
        "fig1b" => ev(Some(0.60), None),
        "fig1c" => ev(Some(0.22), Some(0.73)),
        "fig1d" => ev(Some(0.22), Some(0.78)),
        "fig2a" => ev(Some(1.84), None),
        "fig2b" => ev(Some(3.0), None),
        "fig2c" => ev(Some(1.2), Some(3.0)),
        "fig2d" => ev(None, Some(3.1)),
        "fig4a" => ev(Some(7.7), None),
        "fig4b" => ev(Some(31.0), None),
        "fig4c" => ev(Some(1.2), Some(33.0)),
        "fig4d" => ev(None, Some(34.0)),
        _ => None,
    };
    Some(FigurePreset {
        id,
        config,
        expected,
    })
}

/// `%.{digits}g`-style formatting, independent of locale.
pub fn format_g(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let m = trim_fraction(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_fraction(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn render_csv(s: &MeasureSeries) -> String {
    let mut out = String::with_capacity(80 * (s.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for i in 0..s.len() {
        let row = [
            s.t[i],
            s.d[i],
            s.e[i],
            s.c[i],
            s.trace_error[i],
            s.min_eigenvalue[i],
        ];
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            out.push_str(&format_g(*v, 12));
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Serialize)]
struct CrossingRecord {
    t: f64,
    direction: &'static str,
}

#[derive(Debug, Serialize)]
struct EventSummary {
    #[serde(skip_serializing_if = "Option::is_none")]
    t_cri: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    t_esd: Option<f64>,
    esd_threshold: f64,
    window_end: f64,
    samples: usize,
    positivity_warnings: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_audit_gap: Option<f64>,
    crossings: Vec<CrossingRecord>,
}

pub fn render_events(out: &RunOutcome) -> String {
    let ev = &out.events;
    let summary = EventSummary {
        t_cri: ev.t_cri,
        t_esd: ev.t_esd,
        esd_threshold: ev.esd_threshold,
        window_end: ev.window_end,
        samples: out.series.len(),
        positivity_warnings: out.trajectory.positivity_warnings().count(),
        max_audit_gap: out.series.max_audit_gap(),
        crossings: ev
            .crossings
            .iter()
            .map(|c| CrossingRecord {
                t: c.t,
                direction: match c.direction {
                    Direction::DiscordAhead => "discord_ahead",
                    Direction::EntanglementAhead => "entanglement_ahead",
                },
            })
            .collect(),
    };
    toml::to_string(&summary).expect("event summary serialises")
}

/// Discord dashed, EoF solid, against γ₀t.
pub fn render_svg(s: &MeasureSeries, title: &str) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const L: f64 = 60.0;
    const R: f64 = 20.0;
    const T: f64 = 30.0;
    const B: f64 = 50.0;
    let t_end = s.t.last().copied().unwrap_or(1.0).max(f64::MIN_POSITIVE);
    let y_max = s.d.iter().chain(&s.e).copied().fold(1.0_f64, f64::max);
    let x = |t: f64| L + (W - L - R) * t / t_end;
    let y = |v: f64| H - B - (H - T - B) * v / y_max;
    let poly = |vals: &[f64]| {
        let mut pts = String::new();
        // at most ~2000 vertices
        let step = (s.len() / 2000).max(1);
        for i in (0..s.len())
            .step_by(step)
            .chain(std::iter::once(s.len().saturating_sub(1)))
        {
            if i < s.len() {
                let _ = write!(pts, "{:.2},{:.2} ", x(s.t[i]), y(vals[i]));
            }
        }
        pts
    };
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="18" text-anchor="middle">{}</text>"#,
        W / 2.0,
        escape(title)
    );
    let _ = writeln!(
        svg,
        r#"<path d="M{L},{T} L{L},{} L{},{}" fill="none" stroke="black"/>"#,
        H - B,
        W - R,
        H - B
    );
    for k in 0..=5 {
        let tv = t_end * k as f64 / 5.0;
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{}" text-anchor="middle">{}</text>"#,
            x(tv),
            H - B + 16.0,
            format_g(tv, 3)
        );
        let yv = y_max * k as f64 / 5.0;
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#,
            L - 6.0,
            y(yv) + 4.0,
            format_g(yv, 3)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">γ₀t</text>"#,
        (L + W - R) / 2.0,
        H - 12.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">correlation</text>"#,
        (T + H - B) / 2.0,
        (T + H - B) / 2.0
    );
    let _ = writeln!(
        svg,
        r#"<polyline class="discord" points="{}" fill="none" stroke="black" stroke-dasharray="6,4"/>"#,
        poly(&s.d)
    );
    let _ = writeln!(
        svg,
        r#"<polyline class="eof" points="{}" fill="none" stroke="black"/>"#,
        poly(&s.e)
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="end">D (dashed), E (solid)</text>"#,
        W - R - 4.0,
        T + 14.0
    );
    svg.push_str("</svg>\n");
    svg
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Write via a sibling temporary file and rename, so readers never see a
/// half-written file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let name = path.file_name().ok_or_else(|| {
        CliError::io(
            path,
            io::Error::new(io::ErrorKind::InvalidInput, "not a file path"),
        )
    })?;
    let tmp = dir.join(format!(
        ".{}.tmp{}",
        name.to_string_lossy(),
        std::process::id()
    ));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(CliError::io(path, e));
    }
    Ok(())
}

/// Where artifacts go; `None` fields are skipped, except a missing CSV path
/// sends the CSV to stdout.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct OutputPaths {
    pub csv: Option<PathBuf>,
    pub events: Option<PathBuf>,
    pub svg: Option<PathBuf>,
}

impl OutputPaths {
    fn or(self, other: OutputPaths) -> OutputPaths {
        OutputPaths {
            csv: self.csv.or(other.csv),
            events: self.events.or(other.events),
            svg: self.svg.or(other.svg),
        }
    }
}

fn emit(out: &RunOutcome, paths: &OutputPaths, title: &str) -> Result<(), CliError> {
    let csv = render_csv(&out.series);
    let events = render_events(out);
    let svg = paths.svg.as_ref().map(|_| render_svg(&out.series, title));
    match &paths.csv {
        Some(p) => write_atomic(p, &csv)?,
        None => {
            let stdout = io::stdout();
            stdout
                .lock()
                .write_all(csv.as_bytes())
                .map_err(|e| CliError::io(Path::new("<stdout>"), e))?;
        }
    }
    if let Some(p) = &paths.events {
        write_atomic(p, &events)?;
    }
    if let (Some(p), Some(svg)) = (&paths.svg, svg) {
        write_atomic(p, &svg)?;
    }
    Ok(())
}

pub fn simulate(config: &RunConfig) -> Result<RunOutcome, CliError> {
    let sc = config.scenario()?;
    Ok(analysis::run(&sc)?)
}

/// Run a config file; explicit `paths` override those in the file.
pub fn cmd_simulate(config_path: &Path, paths: OutputPaths) -> Result<RunOutcome, CliError> {
    let config = RunConfig::load(config_path)?;
    let paths = paths.or(OutputPaths {
        csv: config.csv_path.clone(),
        events: config.events_path.clone(),
        svg: config.svg_path.clone(),
    });
    let out = simulate(&config)?;
    emit(&out, &paths, &config_path.display().to_string())?;
    if paths.csv.is_some() && paths.events.is_none() {
        print!("{}", render_events(&out));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub label: String,
    pub expected: f64,
    pub got: Option<f64>,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.got
            .is_some_and(|g| (g - self.expected).abs() <= self.tolerance)
    }
}

impl Check {
    /// The check without its verdict.
    pub fn describe(&self) -> String {
        let got = self.got.map_or("none".to_string(), |g| format!("{g:.4}"));
        format!(
            "{}: got {}, expected {} ± {}",
            self.label,
            got,
            self.expected,
            format_g(self.tolerance, 3)
        )
    }
}

impl std::fmt::Display for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} {}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.describe()
        )
    }
}

pub fn check_events(id: &str, expected: &ExpectedEvents, ev: &EventReport) -> Vec<Check> {
    let mut checks = Vec::new();
    for (name, want, got) in [
        ("t_cri", expected.t_cri, ev.t_cri),
        ("t_esd", expected.t_esd, ev.t_esd),
    ] {
        if let Some(want) = want {
            checks.push(Check {
                label: format!("{id} {name}"),
                expected: want,
                got,
                tolerance: event_tolerance(want),
            });
        }
    }
    checks
}

pub struct FigureOutcome {
    pub preset: FigurePreset,
    pub outcome: RunOutcome,
    pub checks: Vec<Check>,
}

/// Run a preset, writing `<id>.csv`, `<id>.events.toml` and `<id>.svg` into
/// `out_dir` when given.
pub fn cmd_figure(id: &str, out_dir: Option<&Path>) -> Result<FigureOutcome, CliError> {
    let preset = figure_preset(id).ok_or_else(|| {
        CliError::Config(format!("unknown figure id `{id}` (expected fig1a … fig6d)"))
    })?;
    let outcome = simulate(&preset.config)?;
    if let Some(dir) = out_dir {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let paths = OutputPaths {
            csv: Some(dir.join(format!("{id}.csv"))),
            events: Some(dir.join(format!("{id}.events.toml"))),
            svg: Some(dir.join(format!("{id}.svg"))),
        };
        emit(&outcome, &paths, id)?;
    }
    let checks = preset
        .expected
        .as_ref()
        .map(|e| check_events(id, e, &outcome.events))
        .unwrap_or_default();
    Ok(FigureOutcome {
        preset,
        outcome,
        checks,
    })
}

pub fn parse_values(list: &str) -> Result<Vec<f64>, CliError> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| CliError::Config(format!("sweep value `{s}` is not a number")))
        })
        .collect()
}

pub fn render_sweep(rows: &[analysis::SweepRow]) -> String {
    let opt = |v: Option<f64>| v.map_or(String::new(), |x| format_g(x, 12));
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for row in rows {
        let value = format_g(row.value, 12);
        match &row.outcome {
            Ok(s) => {
                let _ = writeln!(
                    out,
                    "{value},{},{},{},{},",
                    opt(s.events.t_cri),
                    opt(s.events.t_esd),
                    format_g(s.final_discord, 12),
                    format_g(s.final_eof, 12)
                );
            }
            Err(e) => {
                let msg = e.to_string().replace(['"', '\n'], "'");
                let _ = writeln!(out, "{value},,,,,\"{msg}\"");
            }
        }
    }
    out
}

/// Sweep one parameter over `values` starting from a config file. Fails only
/// when every row fails.
pub fn cmd_sweep(
    config_path: &Path,
    vary: &str,
    values: &[f64],
    output: Option<&Path>,
) -> Result<Vec<analysis::SweepRow>, CliError> {
    let config = RunConfig::load(config_path)?;
    let vary: SweepParameter = vary.parse().map_err(CliError::Config)?;
    let base = config.scenario()?;
    let rows = analysis::sweep(&base, vary, values);
    let table = render_sweep(&rows);
    match output {
        Some(p) => write_atomic(p, &table)?,
        None => print!("{table}"),
    }
    if !rows.is_empty() && rows.iter().all(|r| r.outcome.is_err()) {
        return Err(CliError::Numerical(format!(
            "all {} sweep rows failed",
            rows.len()
        )));
    }
    Ok(rows)
}

#[derive(Debug, Parser)]
#[command(
    name = "tcl-discord",
    version,
    about = "Discord and entanglement of two atoms in Lorentzian reservoirs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a TOML configuration file.
    Simulate {
        config: PathBuf,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        events: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Run a figure preset (fig1a … fig6d) and check its events.
    Figure {
        id: String,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Vary one parameter (lambda, delta, omega0, theta) over a comma list.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        vary: String,
        #[arg(long, allow_hyphen_values = true)]
        values: String,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Print the preset table.
    Presets,
}

pub fn run_cli(cli: Cli) -> ExitCode {
    let result = match cli.command {
        Command::Simulate {
            config,
            csv,
            events,
            svg,
        } => cmd_simulate(&config, OutputPaths { csv, events, svg }).map(|_| ()),
        Command::Figure { id, out_dir } => cmd_figure(&id, out_dir.as_deref()).map(|fig| {
            let ev = &fig.outcome.events;
            println!(
                "{id}: t_cri = {}, t_esd = {}, window = {}",
                ev.t_cri.map_or("none".into(), |t| format!("{t:.4}")),
                ev.t_esd.map_or("none".into(), |t| format!("{t:.4}")),
                ev.window_end
            );
            for c in &fig.checks {
                println!("{c}");
            }
        }),
        Command::Sweep {
            config,
            vary,
            values,
            output,
        } => parse_values(&values)
            .and_then(|v| cmd_sweep(&config, &vary, &v, output.as_deref()))
            .map(|_| ()),
        Command::Presets => {
            println!("id,state,lambda,delta,theta,t_max,expected_t_cri,expected_t_esd");
            for id in FIGURE_IDS {
                let p = figure_preset(id).expect("listed id");
                let c = &p.config;
                let e = |f: fn(&ExpectedEvents) -> Option<f64>| {
                    p.expected
                        .as_ref()
                        .and_then(f)
                        .map_or(String::new(), |v| v.to_string())
                };
                println!(
                    "{id},{:?},{},{},{},{},{},{}",
                    c.initial_state,
                    c.lambda,
                    c.delta,
                    c.theta,
                    c.t_max,
                    e(|x| x.t_cri),
                    e(|x| x.t_esd)
                );
            }
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tcl-discord: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
