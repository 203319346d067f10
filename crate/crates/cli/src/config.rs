//! Strict JSON run configuration.

use std::path::Path;

use dislocation_core::currents::{OccupationSet, OccupiedState};
use dislocation_core::model::{ModelError, PhysicalParams};
use dislocation_core::oracle::OracleConfig;
use dislocation_core::spectrum::ScanOptions;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("validation error: {field}: {constraint}")]
    Validation { field: String, constraint: String },
}

fn invalid(field: &str, constraint: impl Into<String>) -> ConfigError {
    ConfigError::Validation {
        field: field.into(),
        constraint: constraint.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Spectrum,
    Oracle,
    Currents,
    Sweep,
    CheckSpecfun,
    Checks,
    Wavefunction,
}

impl Task {
    pub fn as_str(self) -> &'static str {
        match self {
            Task::Spectrum => "spectrum",
            Task::Oracle => "oracle",
            Task::Currents => "currents",
            Task::Sweep => "sweep",
            Task::CheckSpecfun => "check-specfun",
            Task::Checks => "checks",
            Task::Wavefunction => "wavefunction",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepVariable {
    #[serde(rename = "beta")]
    Beta,
    #[serde(rename = "B0")]
    B0,
    #[serde(rename = "r0")]
    R0,
    #[serde(rename = "k")]
    K,
    #[serde(rename = "l_shift")]
    LShift,
}

impl SweepVariable {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepVariable::Beta => "beta",
            SweepVariable::B0 => "B0",
            SweepVariable::R0 => "r0",
            SweepVariable::K => "k",
            SweepVariable::LShift => "l_shift",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl SweepSpec {
    pub fn values(&self) -> Vec<f64> {
        let span = self.stop - self.start;
        (0..self.steps)
            .map(|i| {
                if i + 1 == self.steps {
                    self.stop
                } else {
                    self.start + span * i as f64 / (self.steps - 1) as f64
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    pub n: usize,
    pub l: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WavefunctionSpec {
    pub n: usize,
    pub l: i64,
    /// Odd number of grid points (Simpson's rule).
    #[serde(default = "default_points")]
    pub points: usize,
    /// Outer radius; by default six classical radii of the level.
    #[serde(default)]
    pub r_max: Option<f64>,
}

fn default_points() -> usize {
    2001
}

fn one() -> f64 {
    1.0
}

fn default_l_list() -> Vec<i64> {
    vec![0]
}

fn default_n_max() -> usize {
    3
}

/// The configuration file as written, with defaults filled in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    #[serde(default = "one")]
    pub m: f64,
    #[serde(default = "one")]
    pub q: f64,
    #[serde(rename = "B0", default = "one")]
    pub b0: f64,
    #[serde(default = "one")]
    pub r0: f64,
    /// Dislocation parameter; give this or `burgers_b`, not both.
    #[serde(default)]
    pub beta: Option<f64>,
    /// Burgers vector length, converted with `β = b/2π`.
    #[serde(default)]
    pub burgers_b: Option<f64>,
    #[serde(default)]
    pub k: f64,
    #[serde(default)]
    pub task: Option<Task>,
    #[serde(default = "default_l_list")]
    pub l_list: Vec<i64>,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    #[serde(default)]
    pub occupation: Vec<StateSpec>,
    /// Flux step for numerical currents; `ς/1000` when absent.
    #[serde(default)]
    pub dsigma: Option<f64>,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub oracle: OracleConfig,
    #[serde(default)]
    pub scan: ScanOptions,
    #[serde(default)]
    pub wavefunction: Option<WavefunctionSpec>,
}

impl Default for RawConfig {
    fn default() -> Self {
        Self {
            m: 1.0,
            q: 1.0,
            b0: 1.0,
            r0: 1.0,
            beta: Some(0.0),
            burgers_b: None,
            k: 0.0,
            task: Some(Task::Spectrum),
            l_list: default_l_list(),
            n_max: default_n_max(),
            occupation: Vec::new(),
            dsigma: None,
            sweep: None,
            oracle: OracleConfig::default(),
            scan: ScanOptions::default(),
            wavefunction: None,
        }
    }
}

/// A validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub task: Task,
    /// `l` is unused here; see `l_list`.
    pub params: PhysicalParams,
    pub l_list: Vec<i64>,
    pub n_max: usize,
    pub occupation: OccupationSet,
    pub dsigma: Option<f64>,
    pub sweep: Option<SweepSpec>,
    pub oracle: OracleConfig,
    pub scan: ScanOptions,
    pub wavefunction: Option<WavefunctionSpec>,
    pub raw: RawConfig,
}

pub fn parse_config(text: &str) -> Result<RawConfig, ConfigError> {
    serde_json::from_str(text).map_err(|e| {
        use serde_json::error::Category;
        match e.classify() {
            Category::Data => invalid("config", e.to_string()),
            _ => ConfigError::Parse {
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            },
        }
    })
}

/// Reads and validates a configuration. `task` from the command line wins
/// only if the file names no task or the same one.
pub fn load_config(path: &Path, task: Option<Task>) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    validate(parse_config(&text)?, task)
}

fn model_error(e: ModelError) -> ConfigError {
    match e {
        ModelError::InvalidParams { field, constraint } => invalid(field, constraint),
        ModelError::Domain(msg) => invalid("params", msg),
    }
}

pub fn validate(mut raw: RawConfig, task: Option<Task>) -> Result<RunConfig, ConfigError> {
    let task = match (raw.task, task) {
        (Some(a), Some(b)) if a != b => {
            return Err(invalid(
                "task",
                format!(
                    "config names {} but {} was requested",
                    a.as_str(),
                    b.as_str()
                ),
            ))
        }
        (Some(a), _) => a,
        (None, Some(b)) => b,
        (None, None) => return Err(invalid("task", "no task given")),
    };
    raw.task = Some(task);

    let beta = match (raw.beta, raw.burgers_b) {
        (Some(_), Some(_)) => {
            return Err(invalid(
                "burgers_b",
                "give either beta or burgers_b, not both",
            ))
        }
        (Some(b), None) => b,
        (None, Some(b)) => PhysicalParams::beta_from_burgers(b),
        (None, None) => 0.0,
    };
    let params = PhysicalParams {
        m: raw.m,
        q: raw.q,
        b0: raw.b0,
        r0: raw.r0,
        beta,
        k: raw.k,
        l: 0,
    };
    params.validate().map_err(model_error)?;

    if raw.n_max < 1 {
        return Err(invalid("n_max", "n_max must be >= 1"));
    }
    if raw.l_list.is_empty() {
        return Err(invalid("l_list", "must not be empty"));
    }
    let mut ls = raw.l_list.clone();
    ls.sort_unstable();
    ls.dedup();
    if ls.len() != raw.l_list.len() {
        return Err(invalid("l_list", "entries must be distinct"));
    }
    raw.oracle
        .validate()
        .map_err(|e| invalid("oracle", e.to_string()))?;
    if !(raw.scan.divisions >= 1.0) {
        return Err(invalid("scan.divisions", "must be >= 1"));
    }
    if let (Some(f), Some(c)) = (raw.scan.e_floor, raw.scan.e_ceiling) {
        if !(c > f) {
            return Err(invalid("scan.e_ceiling", "must exceed scan.e_floor"));
        }
    }
    if let Some(ds) = raw.dsigma {
        if !(ds > 0.0 && ds.is_finite()) {
            return Err(invalid("dsigma", "must be > 0"));
        }
    }
    let occupation = OccupationSet::new(
        raw.occupation
            .iter()
            .map(|s| OccupiedState {
                n: s.n,
                l: s.l,
                branch: None,
            })
            .collect(),
    )
    .map_err(|e| invalid("occupation", e.to_string()))?;

    if let Some(s) = &raw.sweep {
        if s.steps < 2 {
            return Err(invalid("sweep.steps", "must be >= 2"));
        }
        if !(s.start.is_finite() && s.stop.is_finite()) {
            return Err(invalid("sweep", "start and stop must be finite"));
        }
        match s.variable {
            SweepVariable::B0 | SweepVariable::R0 if !(s.start > 0.0 && s.stop > 0.0) => {
                return Err(invalid(
                    "sweep",
                    format!("{} must stay > 0", s.variable.as_str()),
                ));
            }
            SweepVariable::LShift if s.values().iter().any(|v| v.fract() != 0.0) => {
                return Err(invalid("sweep", "l_shift values must be integers"));
            }
            SweepVariable::Beta if raw.burgers_b.is_some() => {
                return Err(invalid("sweep", "a beta sweep needs beta, not burgers_b"));
            }
            _ => {}
        }
    }
    if let Some(w) = &raw.wavefunction {
        if w.points < 3 || w.points.is_multiple_of(2) {
            return Err(invalid("wavefunction.points", "must be odd and >= 3"));
        }
        if let Some(r) = w.r_max {
            if !(r > raw.r0) {
                return Err(invalid("wavefunction.r_max", "must exceed r0"));
            }
        }
    }

    // blocks a task does not read are rejected rather than ignored
    let uses_sweep = task == Task::Sweep;
    let uses_occupation = task == Task::Currents;
    let uses_dsigma = matches!(task, Task::Currents | Task::Sweep);
    let uses_wavefunction = task == Task::Wavefunction;
    if raw.sweep.is_some() != uses_sweep {
        return Err(invalid(
            "sweep",
            if uses_sweep {
                "required by the sweep task"
            } else {
                "only read by the sweep task"
            },
        ));
    }
    if raw.occupation.is_empty() == uses_occupation {
        return Err(invalid(
            "occupation",
            if uses_occupation {
                "the currents task needs at least one state"
            } else {
                "only read by the currents task"
            },
        ));
    }
    if raw.dsigma.is_some() && !uses_dsigma {
        return Err(invalid(
            "dsigma",
            "only read by the currents and sweep tasks",
        ));
    }
    if raw.wavefunction.is_some() && !uses_wavefunction {
        return Err(invalid(
            "wavefunction",
            "only read by the wavefunction task",
        ));
    }

    Ok(RunConfig {
        task,
        params,
        l_list: raw.l_list.clone(),
        n_max: raw.n_max,
        occupation,
        dsigma: raw.dsigma,
        sweep: raw.sweep,
        oracle: raw.oracle,
        scan: raw.scan,
        wavefunction: raw.wavefunction,
        raw,
    })
}
