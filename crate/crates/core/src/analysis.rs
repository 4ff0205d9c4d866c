//! Discord/entanglement curves along a trajectory, event extraction
//! (crossover and sudden death), and parameter sweeps.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::correlations::{self, CorrelationError, OracleGrid};
use crate::dynamics::{self, InitialState, IntegrationError, IntegratorConfig, Trajectory};
use crate::reservoir::ReservoirParams;

/// `|d − e|` at or below this carries no sign.
pub const SIGN_TOL: f64 = 1e-9;
pub const DEFAULT_ESD_THRESHOLD: f64 = 1e-5;
pub const DEFAULT_AUDIT_STRIDE: usize = 100;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("sample {index} at t = {t}: {source}")]
    Measure {
        index: usize,
        t: f64,
        #[source]
        source: CorrelationError,
    },
    #[error(transparent)]
    Integration(#[from] IntegrationError),
    #[error("invalid ESD threshold {0}")]
    InvalidThreshold(f64),
}

/// One oracle audit of the closed-form discord.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditPoint {
    pub index: usize,
    pub t: f64,
    pub discord_x: f64,
    pub discord_oracle: f64,
}

impl AuditPoint {
    pub fn gap(&self) -> f64 {
        (self.discord_x - self.discord_oracle).abs()
    }
}

/// Per-sample measures along a trajectory.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MeasureSeries {
    pub t: Vec<f64>,
    pub d: Vec<f64>,
    pub e: Vec<f64>,
    pub c: Vec<f64>,
    pub trace_error: Vec<f64>,
    pub min_eigenvalue: Vec<f64>,
    pub audit: Vec<AuditPoint>,
}

impl MeasureSeries {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn max_audit_gap(&self) -> Option<f64> {
        self.audit.iter().map(AuditPoint::gap).reduce(f64::max)
    }
}

/// Discord (X route), concurrence and EoF at every sample; with
/// `audit_stride = Some(n)` the measurement oracle is also run on every n-th
/// sample.
pub fn measure_series(
    traj: &Trajectory,
    audit_stride: Option<usize>,
) -> Result<MeasureSeries, AnalysisError> {
    let n = traj.samples.len();
    let mut s = MeasureSeries {
        t: Vec::with_capacity(n),
        d: Vec::with_capacity(n),
        e: Vec::with_capacity(n),
        c: Vec::with_capacity(n),
        trace_error: Vec::with_capacity(n),
        min_eigenvalue: Vec::with_capacity(n),
        audit: Vec::new(),
    };
    let grid = OracleGrid::default();
    for (index, sample) in traj.samples.iter().enumerate() {
        let wrap = |source| AnalysisError::Measure {
            index,
            t: sample.t,
            source,
        };
        let d = correlations::discord_x(&sample.rho).map_err(wrap)?.discord;
        let c = correlations::concurrence_x(&sample.rho).map_err(wrap)?;
        let e = correlations::eof(c).map_err(wrap)?;
        if let Some(stride) = audit_stride.filter(|&k| k > 0) {
            if index % stride == 0 {
                let o = correlations::discord_oracle(&sample.rho, &grid).map_err(wrap)?;
                s.audit.push(AuditPoint {
                    index,
                    t: sample.t,
                    discord_x: d,
                    discord_oracle: o.discord,
                });
            }
        }
        s.t.push(sample.t);
        s.d.push(d);
        s.e.push(e);
        s.c.push(c);
        s.trace_error.push(sample.diagnostics.trace_error);
        s.min_eigenvalue.push(sample.diagnostics.min_eigenvalue);
    }
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Discord overtakes entanglement.
    DiscordAhead,
    /// Entanglement overtakes discord.
    EntanglementAhead,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    pub t: f64,
    pub direction: Direction,
}

/// Every strict sign change of `d − e`. Samples with `|d − e| ≤ SIGN_TOL`
/// are skipped, so tangential touches are not crossings; a crossing time is
/// linearly interpolated between the two bracketing signed samples.
pub fn crossings(s: &MeasureSeries) -> Vec<Crossing> {
    let mut out = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for i in 0..s.len() {
        let g = s.d[i] - s.e[i];
        if g.abs() <= SIGN_TOL {
            continue;
        }
        if let Some((t0, g0)) = prev {
            if g0.signum() != g.signum() {
                let t = t0 + (s.t[i] - t0) * g0 / (g0 - g);
                let direction = if g > 0.0 {
                    Direction::DiscordAhead
                } else {
                    Direction::EntanglementAhead
                };
                out.push(Crossing { t, direction });
            }
        }
        prev = Some((s.t[i], g));
    }
    out
}

/// Crossover time after which discord stays above entanglement for the rest
/// of the window: the last crossing, provided it goes in that direction.
/// With a single crossing this is simply the first one; with damped
/// oscillations the curves may swap several times before settling.
pub fn detect_crossing(s: &MeasureSeries) -> Option<f64> {
    crossings(s)
        .last()
        .filter(|c| c.direction == Direction::DiscordAhead)
        .map(|c| c.t)
}

/// Sudden-death time: the point after which `e < threshold` for the rest of
/// the window, interpolated where `e` passes the threshold. Only reported
/// when the concurrence is exactly zero somewhere in that tail, so an
/// asymptotic decay that merely becomes small is not death.
pub fn detect_esd(s: &MeasureSeries, threshold: f64) -> Option<f64> {
    let n = s.len();
    if n == 0 {
        return None;
    }
    let last_alive = s.e.iter().rposition(|&e| e >= threshold);
    let first_dead = match last_alive {
        Some(i) if i + 1 == n => return None,
        Some(i) => i + 1,
        None => 0,
    };
    if !s.c[first_dead..].contains(&0.0) {
        return None;
    }
    match last_alive {
        None => Some(s.t[0]),
        Some(i) => {
            let (t0, e0) = (s.t[i], s.e[i]);
            let (t1, e1) = (s.t[first_dead], s.e[first_dead]);
            Some(t0 + (t1 - t0) * (e0 - threshold) / (e0 - e1))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventReport {
    pub t_cri: Option<f64>,
    pub t_esd: Option<f64>,
    pub crossings: Vec<Crossing>,
    pub esd_threshold: f64,
    pub window_end: f64,
}

pub fn events(s: &MeasureSeries, esd_threshold: f64) -> EventReport {
    EventReport {
        t_cri: detect_crossing(s),
        t_esd: detect_esd(s, esd_threshold),
        crossings: crossings(s),
        esd_threshold,
        window_end: s.t.last().copied().unwrap_or(0.0),
    }
}

/// Everything needed to run one configuration end to end.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub initial: InitialState,
    pub params: ReservoirParams,
    pub integrator: IntegratorConfig,
    pub esd_threshold: f64,
    pub audit_stride: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub trajectory: Trajectory,
    pub series: MeasureSeries,
    pub events: EventReport,
}

pub fn run(sc: &Scenario) -> Result<RunOutcome, AnalysisError> {
    if !(sc.esd_threshold.is_finite() && sc.esd_threshold > 0.0) {
        return Err(AnalysisError::InvalidThreshold(sc.esd_threshold));
    }
    let trajectory = dynamics::integrate(&sc.initial, &sc.params, &sc.integrator)?;
    let series = measure_series(&trajectory, sc.audit_stride)?;
    let events = events(&series, sc.esd_threshold);
    Ok(RunOutcome {
        trajectory,
        series,
        events,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    Lambda,
    Delta,
    Omega0,
    Theta,
}

impl SweepParameter {
    pub fn name(&self) -> &'static str {
        match self {
            SweepParameter::Lambda => "lambda",
            SweepParameter::Delta => "delta",
            SweepParameter::Omega0 => "omega0",
            SweepParameter::Theta => "theta",
        }
    }

    pub fn apply(&self, base: &Scenario, value: f64) -> Scenario {
        let mut sc = *base;
        match self {
            SweepParameter::Lambda => sc.params.lambda = value,
            SweepParameter::Delta => sc.params.delta = value,
            SweepParameter::Omega0 => sc.params.omega0 = value,
            SweepParameter::Theta => sc.params.theta = value,
        }
        sc
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParameter {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "lambda" => Ok(SweepParameter::Lambda),
            "delta" => Ok(SweepParameter::Delta),
            "omega0" => Ok(SweepParameter::Omega0),
            "theta" => Ok(SweepParameter::Theta),
            other => Err(format!(
                "unknown sweep parameter `{other}` (expected lambda, delta, omega0 or theta)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSummary {
    pub events: EventReport,
    pub final_discord: f64,
    pub final_eof: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub outcome: Result<SweepSummary, AnalysisError>,
}

/// Run `base` once per value of `vary`. Rows run in parallel and come back
/// in input order; a failing row does not stop the others.
pub fn sweep(base: &Scenario, vary: SweepParameter, values: &[f64]) -> Vec<SweepRow> {
    values
        .par_iter()
        .map(|&value| {
            let sc = vary.apply(base, value);
            let outcome = sc
                .params
                .validate()
                .map_err(|e| AnalysisError::Integration(e.into()))
                .and_then(|_| run(&sc))
                .map(|out| SweepSummary {
                    final_discord: out.series.d.last().copied().unwrap_or(f64::NAN),
                    final_eof: out.series.e.last().copied().unwrap_or(f64::NAN),
                    events: out.events,
                });
            SweepRow { value, outcome }
        })
        .collect()
}
