//! Task runners. Each returns its artifacts in memory; nothing touches the
//! filesystem until a run has fully succeeded.

use dislocation_core::currents::{
    current_from_spectrum, formula_summand, CurrentsError, OccupationSet, OccupiedState,
};
use dislocation_core::model::{derive, ModelError, PhysicalParams};
use dislocation_core::oracle::{convergence_report, solve_radial_eigenproblem, OracleError};
use dislocation_core::spectrum::{
    asymptotic_energy, asymptotic_levels, cosine_condition_levels, default_r_max,
    find_exact_levels, radial_wavefunction, restriction_bound, uniform_grid, Branch, ClosedForm,
    EnergyLevel, SpectrumError,
};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::checks::{full_battery, specfun_checks, CheckReport};
use crate::config::{RunConfig, SweepVariable, Task, WavefunctionSpec};
use crate::format::{g15, opt, Csv};

pub const SPECTRUM_HEADER: [&str; 10] = [
    "n",
    "l",
    "branch",
    "method",
    "energy",
    "residual",
    "gamma",
    "sigma_flux",
    "omega",
    "y0",
];
pub const SWEEP_HEADER: [&str; 9] = [
    "sweep_var",
    "value",
    "n",
    "l",
    "E_exact",
    "E_asym_plus",
    "E_asym_minus",
    "current_formula",
    "current_numeric",
];
pub const ORACLE_HEADER: [&str; 5] = ["n", "l", "energy", "tau", "error_estimate"];
pub const CURRENTS_HEADER: [&str; 6] = [
    "scope",
    "n",
    "l",
    "current_formula_plus",
    "current_formula_minus",
    "current_numeric",
];
pub const WAVEFUNCTION_HEADER: [&str; 2] = ["r", "u"];

/// Default flux step of the numerical currents, relative to `ς`.
pub const DSIGMA_REL: f64 = 1e-3;

#[derive(Debug, Error)]
pub enum TaskError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
    #[error(transparent)]
    Currents(#[from] CurrentsError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Artifacts {
    pub csv: String,
    pub sidecar: Value,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Table(Artifacts),
    Report(CheckReport),
}

pub fn run(cfg: &RunConfig) -> Result<Outcome, TaskError> {
    Ok(match cfg.task {
        Task::Spectrum => Outcome::Table(run_spectrum(cfg)?),
        Task::Oracle => Outcome::Table(run_oracle(cfg)?),
        Task::Currents => Outcome::Table(run_currents(cfg)?),
        Task::Sweep => Outcome::Table(run_sweep(cfg)?),
        Task::Wavefunction => Outcome::Table(run_wavefunction(cfg)?),
        Task::CheckSpecfun => Outcome::Report(CheckReport::new(specfun_checks())),
        Task::Checks => Outcome::Report(CheckReport::new(full_battery(cfg))),
    })
}

fn sidecar(cfg: &RunConfig, body: Value) -> Value {
    let mut v = json!({
        "task": cfg.task.as_str(),
        "config": cfg.raw,
        "sigma_flux": cfg.params.missing_flux(),
        "flux_quanta": cfg.params.flux_quanta(),
    });
    if let (Value::Object(out), Value::Object(extra)) = (&mut v, body) {
        out.extend(extra);
    }
    v
}

#[derive(Serialize)]
struct SpectrumRow {
    n: usize,
    l: i64,
    branch: Branch,
    method: dislocation_core::spectrum::Method,
    energy: f64,
    residual: Option<f64>,
}

impl From<&EnergyLevel> for SpectrumRow {
    fn from(lev: &EnergyLevel) -> Self {
        Self {
            n: lev.n,
            l: lev.l,
            branch: lev.branch,
            method: lev.method,
            energy: lev.energy,
            residual: lev.residual,
        }
    }
}

/// Exact, cosine-condition and closed-form levels side by side, one row per
/// `(level, method, branch)`.
pub fn run_spectrum(cfg: &RunConfig) -> Result<Artifacts, TaskError> {
    let p = &cfg.params;
    let exact = find_exact_levels(p, cfg.n_max, &cfg.l_list, &cfg.scan)?;
    let cosine = cosine_condition_levels(p, cfg.n_max, &cfg.l_list, &cfg.scan)?;
    let (asym, skipped) = match asymptotic_levels(p, cfg.n_max, &cfg.l_list) {
        Ok(r) => (r.levels, r.skipped),
        Err(SpectrumError::RestrictionViolated { .. }) => {
            let mut all = Vec::new();
            for &l in &exact.sectors.iter().map(|s| s.l).collect::<Vec<_>>() {
                all.extend((0..cfg.n_max).map(|n| (l, n)));
            }
            (Vec::new(), all)
        }
        Err(e) => return Err(e.into()),
    };

    let mut csv = Csv::new(&SPECTRUM_HEADER);
    let mut rows = Vec::new();
    for sector in &exact.sectors {
        let d = sector.derived;
        let levels = exact
            .levels
            .iter()
            .chain(&cosine.levels)
            .chain(&asym)
            .filter(|lev| lev.l == sector.l);
        for lev in levels {
            csv.push(vec![
                lev.n.to_string(),
                lev.l.to_string(),
                lev.branch.as_str().into(),
                lev.method.as_str().into(),
                g15(lev.energy),
                opt(lev.residual),
                g15(d.gamma),
                g15(d.sigma_flux),
                g15(d.omega),
                g15(d.y0),
            ]);
            rows.push(SpectrumRow::from(lev));
        }
    }
    let bound = restriction_bound(p.q, p.missing_flux());
    Ok(Artifacts {
        csv: csv.render(),
        sidecar: sidecar(
            cfg,
            json!({
                "sectors": exact.sectors,
                "cosine_roots_found": cosine.sectors.iter().map(|s| (s.l, s.roots_found)).collect::<Vec<_>>(),
                "restriction_bound": bound,
                "asymptotic_skipped": skipped,
                "rows": rows,
            }),
        ),
    })
}

/// Finite-difference levels and a ground-state convergence study per `l`.
pub fn run_oracle(cfg: &RunConfig) -> Result<Artifacts, TaskError> {
    let mut ls = cfg.l_list.clone();
    ls.sort_unstable();
    let per_l = ls
        .par_iter()
        .map(|&l| {
            let p = cfg.params.with_l(l);
            let d = derive(&p)?;
            let levels = solve_radial_eigenproblem(&d, &p, cfg.n_max, &cfg.oracle)?;
            let report = convergence_report(&d, &p, &cfg.oracle)?;
            Ok((l, levels, report))
        })
        .collect::<Result<Vec<_>, TaskError>>()?;

    let mut csv = Csv::new(&ORACLE_HEADER);
    let mut reports = Vec::new();
    for (l, levels, report) in &per_l {
        for lev in levels {
            csv.push(vec![
                lev.n.to_string(),
                l.to_string(),
                g15(lev.energy),
                g15(lev.tau),
                g15(lev.error_estimate),
            ]);
        }
        reports.push(json!({ "l": l, "convergence": report }));
    }
    Ok(Artifacts {
        csv: csv.render(),
        sidecar: sidecar(
            cfg,
            json!({ "levels": per_l.iter().map(|x| &x.1).collect::<Vec<_>>(), "convergence": reports }),
        ),
    })
}

fn dsigma_for(cfg: &RunConfig, p: &PhysicalParams) -> f64 {
    cfg.dsigma.unwrap_or(DSIGMA_REL * p.missing_flux())
}

fn restricted<T>(r: Result<T, CurrentsError>) -> Result<Option<T>, TaskError> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(CurrentsError::RestrictionViolated { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

/// Per-state and total currents from both closed-form branches and from
/// numerically differentiated exact levels.
pub fn run_currents(cfg: &RunConfig) -> Result<Artifacts, TaskError> {
    let p = &cfg.params;
    let cf = ClosedForm::from_params(p)?;
    let dsigma = dsigma_for(cfg, p);
    let per_state = cfg
        .occupation
        .states()
        .par_iter()
        .map(|s| {
            let plus = restricted(formula_summand(&cf, s.n, Branch::Plus))?;
            let minus = restricted(formula_summand(&cf, s.n, Branch::Minus))?;
            let single = OccupationSet::new(vec![*s])?;
            let numeric = current_from_spectrum(p, &single, dsigma, &cfg.scan)?;
            Ok((*s, plus, minus, numeric))
        })
        .collect::<Result<Vec<_>, TaskError>>()?;

    let mut csv = Csv::new(&CURRENTS_HEADER);
    let (mut tp, mut tm, mut tn) = (Some(0.0), Some(0.0), 0.0);
    let mut states = Vec::new();
    for (s, plus, minus, numeric) in &per_state {
        csv.push(vec![
            "state".into(),
            s.n.to_string(),
            s.l.to_string(),
            opt(*plus),
            opt(*minus),
            g15(*numeric),
        ]);
        tp = tp.zip(*plus).map(|(a, b)| a + b);
        tm = tm.zip(*minus).map(|(a, b)| a + b);
        tn += numeric;
        states.push(json!({
            "n": s.n, "l": s.l,
            "current_formula_plus": plus, "current_formula_minus": minus, "current_numeric": numeric,
        }));
    }
    csv.push(vec![
        "total".into(),
        String::new(),
        String::new(),
        opt(tp),
        opt(tm),
        g15(tn),
    ]);
    Ok(Artifacts {
        csv: csv.render(),
        sidecar: sidecar(
            cfg,
            json!({
                    "dsigma": dsigma,
                    "sigma_flux": p.missing_flux(),
            "flux_quanta": p.flux_quanta(),
                    "omega": cf.omega,
                    "states": states,
                    "total": { "current_formula_plus": tp, "current_formula_minus": tm, "current_numeric": tn },
                }),
        ),
    })
}

fn sweep_params(cfg: &RunConfig, var: SweepVariable, v: f64) -> (PhysicalParams, Vec<i64>) {
    let mut p = cfg.params;
    let mut ls = cfg.l_list.clone();
    match var {
        SweepVariable::Beta => p.beta = v,
        SweepVariable::B0 => p.b0 = v,
        SweepVariable::R0 => p.r0 = v,
        SweepVariable::K => p.k = v,
        SweepVariable::LShift => ls.iter_mut().for_each(|l| *l += v as i64),
    }
    ls.sort_unstable();
    (p, ls)
}

fn sweep_point(
    cfg: &RunConfig,
    var: SweepVariable,
    v: f64,
) -> Result<(Vec<Vec<String>>, Value), TaskError> {
    let (p, ls) = sweep_params(cfg, var, v);
    p.validate()?;
    let exact = find_exact_levels(&p, cfg.n_max, &ls, &cfg.scan)?;
    let dsigma = dsigma_for(cfg, &p);
    let mut rows = Vec::new();
    for &l in &ls {
        let pl = p.with_l(l);
        let cf = ClosedForm::from_params(&pl)?;
        let energies = exact.energies(l, Branch::Exact);
        for n in 0..cfg.n_max {
            let asym = |b| match asymptotic_energy(&pl, n, b) {
                Ok(e) => Ok(Some(e)),
                Err(SpectrumError::RestrictionViolated { .. }) => Ok(None),
                Err(e) => Err(TaskError::from(e)),
            };
            let current_formula = restricted(formula_summand(&cf, n, Branch::Plus))?;
            let occ = OccupationSet::new(vec![OccupiedState { n, l, branch: None }])?;
            let current_numeric = match current_from_spectrum(&p, &occ, dsigma, &cfg.scan) {
                Ok(c) => Some(c),
                Err(CurrentsError::StateLost { .. }) => None,
                Err(e) => return Err(e.into()),
            };
            rows.push(vec![
                var.as_str().into(),
                g15(v),
                n.to_string(),
                l.to_string(),
                opt(energies.get(n).copied()),
                opt(asym(Branch::Plus)?),
                opt(asym(Branch::Minus)?),
                opt(current_formula),
                opt(current_numeric),
            ]);
        }
    }
    let point = json!({
        "value": v,
        "sigma_flux": p.missing_flux(),
        "flux_quanta": p.flux_quanta(),
        "dsigma": dsigma,
        "sectors": exact.sectors,
    });
    Ok((rows, point))
}

/// Tracked levels and single-state currents along a one-parameter sweep.
pub fn run_sweep(cfg: &RunConfig) -> Result<Artifacts, TaskError> {
    let spec = cfg
        .sweep
        .ok_or_else(|| TaskError::Invalid("the sweep task needs a sweep block".into()))?;
    let points = spec
        .values()
        .par_iter()
        .map(|&v| sweep_point(cfg, spec.variable, v))
        .collect::<Result<Vec<_>, _>>()?;
    let mut csv = Csv::new(&SWEEP_HEADER);
    let mut meta = Vec::new();
    for (rows, point) in points {
        rows.into_iter().for_each(|r| csv.push(r));
        meta.push(point);
    }
    Ok(Artifacts {
        csv: csv.render(),
        sidecar: sidecar(cfg, json!({ "points": meta })),
    })
}

/// Normalized radial wavefunction of one root-found level.
pub fn run_wavefunction(cfg: &RunConfig) -> Result<Artifacts, TaskError> {
    let spec = cfg.wavefunction.unwrap_or(WavefunctionSpec {
        n: 0,
        l: cfg.l_list[0],
        points: 2001,
        r_max: None,
    });
    let p = cfg.params.with_l(spec.l);
    let spectrum = find_exact_levels(&p, spec.n + 1, &[spec.l], &cfg.scan)?;
    let level = *spectrum.levels.get(spec.n).ok_or_else(|| {
        TaskError::Invalid(format!("level n = {} not found in the scan window", spec.n))
    })?;
    let d = spectrum.sectors[0].derived;
    let r_max = spec
        .r_max
        .unwrap_or_else(|| default_r_max(&d, p.r0, spec.n));
    let grid = uniform_grid(p.r0, r_max, spec.points - 1);
    let u = radial_wavefunction(&level, &d, &grid)?;

    let mut csv = Csv::new(&WAVEFUNCTION_HEADER);
    for (r, v) in grid.iter().zip(&u) {
        csv.push(vec![g15(*r), g15(*v)]);
    }
    let peak = u.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    Ok(Artifacts {
        csv: csv.render(),
        sidecar: sidecar(
            cfg,
            json!({
                "level": level,
                "derived": d,
                "r_max": r_max,
                "boundary_ratio": u[0].abs() / peak,
            }),
        ),
    })
}
