//! Bound-state energies and radial wavefunctions.
//!
//! Regularity at the origin is traded for a hard wall at `r0`, so with
//! `y = mωr²/2` the radial solution is
//!
//! ```text
//! u(y) = e^{−y/2} y^{|γ|/2} U(a, |γ| + 1; y),   a = |γ|/2 + 1/2 − τ/(2mω)
//! ```
//!
//! and the levels are the roots of `U(a(E), |γ| + 1; y0) = 0`. Three routes
//! are provided:
//!
//! - [`find_exact_levels`]: sign-change scan and bisection on that condition,
//! - [`cosine_condition_levels`]: roots of the large-`|a|` cosine form of `U`,
//! - [`asymptotic_levels`]: the closed-form two-branch levels that follow
//!   from the cosine form.
//!
//! Writing `s = √(2y0τ/(mω))`, the cosine phase is `π/4 + s − πs²/(4y0)`,
//! a downward parabola in `s`. Setting it to `π/2 + nπ` gives a quadratic
//! whose two roots are exactly the `±` branches of the closed form, so the
//! closed form only reaches the roots near the phase maximum. The roots on the
//! far side of the maximum (phase `π/2 − jπ`, `j ≥ 1`) are the ones that
//! approach the exact levels as `|a|` grows.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{derive, DerivedParams, ModelError, PhysicalParams};
use crate::oracle::{classical_radius, ground_state_estimate, OracleError};
use crate::quadrature::simpson_uniform;
use crate::specfun::{cosine_phase, tricomi_u_unchecked, SpecFunError, SpecFunResult};

/// Scan cells per `ω`.
pub const SCAN_DIVISIONS: f64 = 40.0;
/// Bisection stops when the bracket is this narrow, in units of `ω`.
pub const BISECTION_TOL: f64 = 1e-12;
/// Roots closer than this (units of `ω`) are the same root.
pub const DEDUP_TOL: f64 = 1e-10;
/// `|U|` at a root relative to `|U|` at the ends of its scan cell.
pub const RESIDUAL_TOL: f64 = 1e-9;
/// Target accuracy of the cosine phase at a root.
pub const PHASE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectrumError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("no roots found for l = {l} in [{e_floor}, {e_ceiling}]")]
    NoRootsFound {
        l: i64,
        e_floor: f64,
        e_ceiling: f64,
    },
    #[error("scan too coarse for l = {l}: unresolved pair of roots near E = {energy}")]
    ScanTooCoarse { l: i64, energy: f64 },
    #[error("residual {residual:e} at E = {energy} exceeds {tolerance:e}")]
    ResidualTooLarge {
        energy: f64,
        residual: f64,
        tolerance: f64,
    },
    #[error("n = {n} violates n < {bound} (admissible: {})", admissible_range(*.bound))]
    RestrictionViolated { n: usize, bound: f64 },
}

fn admissible_range(bound: f64) -> String {
    match max_admissible_n(bound) {
        Some(0) => "n = 0".into(),
        Some(n) => format!("0 <= n <= {n}"),
        None => "none".into(),
    }
}

fn max_admissible_n(bound: f64) -> Option<usize> {
    if bound <= 0.0 {
        None
    } else {
        Some(bound.ceil() as usize - 1)
    }
}

/// Sign choice of the closed form. `Exact` marks levels with no `±` choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Plus,
    Minus,
    Exact,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Plus => "plus",
            Branch::Minus => "minus",
            Branch::Exact => "exact",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Cosine,
    Asymptotic,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Cosine => "cosine",
            Method::Asymptotic => "asymptotic",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyLevel {
    pub n: usize,
    pub l: i64,
    pub branch: Branch,
    pub method: Method,
    pub energy: f64,
    /// `|U|` at the root for exact levels, `|phase − (π/2 + jπ)|` for cosine
    /// levels, absent for the closed form.
    pub residual: Option<f64>,
}

/// Energy window override for the root scans.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanOptions {
    /// Scan cells per `ω`.
    pub divisions: f64,
    pub e_floor: Option<f64>,
    pub e_ceiling: Option<f64>,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            divisions: SCAN_DIVISIONS,
            e_floor: None,
            e_ceiling: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanWindow {
    pub e_floor: f64,
    pub e_ceiling: f64,
    pub step: f64,
}

/// Per-`l` bookkeeping of a spectrum run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sector {
    pub l: i64,
    pub derived: DerivedParams,
    pub window: Option<ScanWindow>,
    pub roots_found: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumResult {
    pub params: PhysicalParams,
    pub method: Method,
    pub sectors: Vec<Sector>,
    /// Ordered by `(l, n, branch)`.
    pub levels: Vec<EnergyLevel>,
    /// `(l, n)` pairs left out because they violate the closed-form
    /// restriction.
    pub skipped: Vec<(i64, usize)>,
}

impl SpectrumResult {
    /// Energies of one `(l, branch)` series in increasing `n`.
    pub fn energies(&self, l: i64, branch: Branch) -> Vec<f64> {
        self.levels
            .iter()
            .filter(|lev| lev.l == l && lev.branch == branch)
            .map(|lev| lev.energy)
            .collect()
    }
}

/// `(a, b)` of the quantization condition at energy `e`.
pub fn u_parameters(e: f64, d: &DerivedParams) -> (f64, f64) {
    let tau = d.tau_map().tau(e);
    let g = d.gamma.abs();
    (0.5 * g + 0.5 - tau / (2.0 * d.m * d.omega), g + 1.0)
}

/// `U(a(E), |γ| + 1; y0)`, whose zeros are the bound states.
pub fn quantization_function(e: f64, d: &DerivedParams) -> Result<f64, SpecFunError> {
    quantization_eval(e, d).map(|r| r.value)
}

fn quantization_eval(e: f64, d: &DerivedParams) -> Result<SpecFunResult, SpecFunError> {
    if !(d.omega > 0.0 && d.y0 > 0.0) {
        return Err(SpecFunError::Domain(format!(
            "need omega > 0 and y0 > 0, got {} and {}",
            d.omega, d.y0
        )));
    }
    let (a, b) = u_parameters(e, d);
    tricomi_u_unchecked(a, b, d.y0)
}

fn check_inputs(n_max: usize, l_list: &[i64]) -> Result<(), SpectrumError> {
    if n_max < 1 {
        return Err(SpectrumError::InvalidInput("n_max must be >= 1".into()));
    }
    if l_list.is_empty() {
        return Err(SpectrumError::InvalidInput("l_list is empty".into()));
    }
    let mut sorted = l_list.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != l_list.len() {
        return Err(SpectrumError::InvalidInput("l_list has duplicates".into()));
    }
    Ok(())
}

/// Default window: `E_floor = E0 − 2ω` below a coarse oracle ground state
/// `E0`, `E_ceiling = E_floor + (n_max + |γ| + 8)ω`. Either end can be
/// overridden.
pub fn scan_window(
    p: &PhysicalParams,
    d: &DerivedParams,
    n_max: usize,
    opts: &ScanOptions,
) -> Result<ScanWindow, SpectrumError> {
    if !(opts.divisions >= 1.0) {
        return Err(SpectrumError::InvalidInput(
            "scan divisions must be >= 1".into(),
        ));
    }
    let e_floor = match opts.e_floor {
        Some(f) => f,
        None => ground_state_estimate(d, p)? - 2.0 * d.omega,
    };
    let e_ceiling = opts
        .e_ceiling
        .unwrap_or(e_floor + (n_max as f64 + d.gamma.abs() + 8.0) * d.omega);
    if !(e_ceiling > e_floor) {
        return Err(SpectrumError::InvalidInput(format!(
            "empty scan window [{e_floor}, {e_ceiling}]"
        )));
    }
    Ok(ScanWindow {
        e_floor,
        e_ceiling,
        step: d.omega / opts.divisions,
    })
}

fn sort_levels(levels: &mut [EnergyLevel]) {
    levels.sort_by_key(|x| (x.l, x.n, x.branch));
}

/// Root-found levels for each `l`, lowest `n_max` per `l`.
pub fn find_exact_levels(
    p: &PhysicalParams,
    n_max: usize,
    l_list: &[i64],
    opts: &ScanOptions,
) -> Result<SpectrumResult, SpectrumError> {
    check_inputs(n_max, l_list)?;
    let per_l: Vec<(Sector, Vec<EnergyLevel>)> = l_list
        .par_iter()
        .map(|&l| exact_sector(p, l, n_max, opts))
        .collect::<Result<_, _>>()?;
    Ok(assemble(p, Method::Exact, per_l, Vec::new()))
}

fn assemble(
    p: &PhysicalParams,
    method: Method,
    per_l: Vec<(Sector, Vec<EnergyLevel>)>,
    skipped: Vec<(i64, usize)>,
) -> SpectrumResult {
    let mut sectors = Vec::with_capacity(per_l.len());
    let mut levels = Vec::new();
    for (s, lv) in per_l {
        sectors.push(s);
        levels.extend(lv);
    }
    sectors.sort_by_key(|s| s.l);
    sort_levels(&mut levels);
    SpectrumResult {
        params: *p,
        method,
        sectors,
        levels,
        skipped,
    }
}

fn exact_sector(
    p: &PhysicalParams,
    l: i64,
    n_max: usize,
    opts: &ScanOptions,
) -> Result<(Sector, Vec<EnergyLevel>), SpectrumError> {
    let pl = p.with_l(l);
    let d = derive(&pl)?;
    let mut window = scan_window(&pl, &d, n_max, opts)?;
    let roots = match scan_roots(&d, l, &window) {
        Err(SpectrumError::ScanTooCoarse { .. }) => {
            window.step /= 10.0;
            scan_roots(&d, l, &window)?
        }
        other => other?,
    };
    if roots.is_empty() {
        return Err(SpectrumError::NoRootsFound {
            l,
            e_floor: window.e_floor,
            e_ceiling: window.e_ceiling,
        });
    }
    let roots_found = roots.len();
    let levels = roots
        .into_iter()
        .take(n_max)
        .enumerate()
        .map(|(n, (energy, residual))| EnergyLevel {
            n,
            l,
            branch: Branch::Exact,
            method: Method::Exact,
            energy,
            residual: Some(residual),
        })
        .collect();
    Ok((
        Sector {
            l,
            derived: d,
            window: Some(window),
            roots_found,
        },
        levels,
    ))
}

/// Sign-change scan of the quantization function over the window; returns
/// `(energy, |U|)` pairs in increasing energy.
fn scan_roots(d: &DerivedParams, l: i64, w: &ScanWindow) -> Result<Vec<(f64, f64)>, SpectrumError> {
    let cells = ((w.e_ceiling - w.e_floor) / w.step).ceil() as usize;
    let energies: Vec<f64> = (0..=cells).map(|i| w.e_floor + i as f64 * w.step).collect();
    let values: Vec<f64> = energies
        .iter()
        .map(|&e| quantization_function(e, d))
        .collect::<Result<_, _>>()?;

    // |U| dipping towards zero without a sign change: two roots in a cell
    for i in 1..cells {
        let (f0, f1, f2) = (values[i - 1], values[i], values[i + 1]);
        if f0 * f1 > 0.0 && f1 * f2 > 0.0 && f1.abs() < f0.abs() && f1.abs() < f2.abs() {
            let curv = 0.5 * (f0 + f2) - f1;
            let slope = 0.5 * (f2 - f0);
            let vertex = f1 - slope * slope / (4.0 * curv);
            if vertex * f1 < 0.0 {
                return Err(SpectrumError::ScanTooCoarse {
                    l,
                    energy: energies[i],
                });
            }
        }
    }

    let tol = BISECTION_TOL * d.omega;
    let mut roots: Vec<(f64, f64)> = Vec::new();
    for i in 0..cells {
        let (mut lo, mut hi) = (energies[i], energies[i + 1]);
        let (mut flo, fhi) = (values[i], values[i + 1]);
        let root = if flo == 0.0 {
            lo
        } else if fhi == 0.0 {
            hi
        } else if flo * fhi < 0.0 {
            while hi - lo > tol {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                let fm = quantization_function(mid, d)?;
                if fm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if (fm < 0.0) == (flo < 0.0) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        } else {
            continue;
        };
        let residual = quantization_function(root, d)?.abs();
        let tolerance = RESIDUAL_TOL * values[i].abs().max(values[i + 1].abs());
        if residual > tolerance {
            return Err(SpectrumError::ResidualTooLarge {
                energy: root,
                residual,
                tolerance,
            });
        }
        match roots.last() {
            Some(&(prev, _)) if (root - prev).abs() <= DEDUP_TOL * d.omega => {}
            _ => roots.push((root, residual)),
        }
    }
    Ok(roots)
}

/// Upper end of the closed-form restriction, `n < |q|ς/(2π³) − 1/4`.
pub fn restriction_bound(q: f64, sigma_flux: f64) -> f64 {
    q.abs() * sigma_flux / (2.0 * PI.powi(3)) - 0.25
}

/// `1 − π³(4n + 1)/(2qς)`, positive exactly when `n` is admissible.
pub fn discriminant(q: f64, sigma_flux: f64, n: usize) -> f64 {
    1.0 - PI.powi(3) * (4.0 * n as f64 + 1.0) / (2.0 * q * sigma_flux)
}

/// Symbols of the closed-form levels, with `ω` and `ς` independent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedForm {
    pub q: f64,
    pub m: f64,
    pub k: f64,
    pub omega: f64,
    pub sigma_flux: f64,
    /// `l − βk`, the flux-free part of `γ`.
    pub l_eff: f64,
}

impl ClosedForm {
    pub fn from_params(p: &PhysicalParams) -> Result<Self, SpectrumError> {
        let d = derive(p)?;
        Ok(Self {
            q: p.q,
            m: p.m,
            k: p.k,
            omega: d.omega,
            sigma_flux: d.sigma_flux,
            l_eff: p.l as f64 - p.beta * p.k,
        })
    }

    pub fn with_flux(self, sigma_flux: f64) -> Self {
        Self { sigma_flux, ..self }
    }

    pub fn gamma(&self) -> f64 {
        self.l_eff + self.q * self.sigma_flux / (2.0 * PI)
    }

    pub fn bound(&self) -> f64 {
        restriction_bound(self.q, self.sigma_flux)
    }

    pub fn discriminant(&self, n: usize) -> f64 {
        discriminant(self.q, self.sigma_flux, n)
    }

    /// `E = −ω[n + γ/2 + 1/4] + (qς/π³)ω[1 ± √D] + k²/2m`.
    pub fn energy(&self, n: usize, branch: Branch) -> Result<f64, SpectrumError> {
        let sign = branch_sign(branch)?;
        let bound = self.bound();
        let disc = self.discriminant(n);
        if !((n as f64) < bound) || !(disc > 0.0) {
            return Err(SpectrumError::RestrictionViolated { n, bound });
        }
        let w = self.omega;
        let qs = self.q * self.sigma_flux;
        Ok(-w * (n as f64 + 0.5 * self.gamma() + 0.25)
            + qs / PI.powi(3) * w * (1.0 + sign * disc.sqrt())
            + self.k * self.k / (2.0 * self.m))
    }
}

/// `+1` for the plus branch, `−1` for the minus branch.
pub fn branch_sign(branch: Branch) -> Result<f64, SpectrumError> {
    match branch {
        Branch::Plus => Ok(1.0),
        Branch::Minus => Ok(-1.0),
        Branch::Exact => Err(SpectrumError::InvalidInput(
            "the closed form has only plus and minus branches".into(),
        )),
    }
}

/// Closed-form level of `p` (see [`ClosedForm::energy`]).
pub fn asymptotic_energy(
    p: &PhysicalParams,
    n: usize,
    branch: Branch,
) -> Result<f64, SpectrumError> {
    ClosedForm::from_params(p)?.energy(n, branch)
}

/// Both closed-form branches for every admissible `n < n_max`; the rest are
/// listed in [`SpectrumResult::skipped`].
pub fn asymptotic_levels(
    p: &PhysicalParams,
    n_max: usize,
    l_list: &[i64],
) -> Result<SpectrumResult, SpectrumError> {
    check_inputs(n_max, l_list)?;
    let mut per_l = Vec::with_capacity(l_list.len());
    let mut skipped = Vec::new();
    for &l in l_list {
        let pl = p.with_l(l);
        let d = derive(&pl)?;
        let mut levels = Vec::new();
        for n in 0..n_max {
            for branch in [Branch::Plus, Branch::Minus] {
                match asymptotic_energy(&pl, n, branch) {
                    Ok(energy) => levels.push(EnergyLevel {
                        n,
                        l,
                        branch,
                        method: Method::Asymptotic,
                        energy,
                        residual: None,
                    }),
                    Err(SpectrumError::RestrictionViolated { .. }) => {
                        if branch == Branch::Plus {
                            skipped.push((l, n));
                        }
                    }
                    Err(e) => return Err(e),
                }
            }
        }
        if levels.is_empty() {
            return Err(SpectrumError::RestrictionViolated {
                n: 0,
                bound: restriction_bound(p.q, d.sigma_flux),
            });
        }
        let roots_found = levels.len();
        per_l.push((
            Sector {
                l,
                derived: d,
                window: None,
                roots_found,
            },
            levels,
        ));
    }
    Ok(assemble(p, Method::Asymptotic, per_l, skipped))
}

/// Roots of the cosine form of the quantization condition for `τ > 0`,
/// labelled by energy rank.
pub fn cosine_condition_levels(
    p: &PhysicalParams,
    n_max: usize,
    l_list: &[i64],
    opts: &ScanOptions,
) -> Result<SpectrumResult, SpectrumError> {
    check_inputs(n_max, l_list)?;
    let per_l: Vec<(Sector, Vec<EnergyLevel>)> = l_list
        .par_iter()
        .map(|&l| cosine_sector(p, l, n_max, opts))
        .collect::<Result<_, _>>()?;
    Ok(assemble(p, Method::Cosine, per_l, Vec::new()))
}

/// Cosine phase as a function of `τ`, continued by its limit `π/4` at `τ = 0`.
fn phase_at(tau: f64, d: &DerivedParams) -> Result<f64, SpecFunError> {
    if tau == 0.0 {
        return Ok(FRAC_PI_4);
    }
    let (a, b) = u_parameters(d.tau_map().energy(tau), d);
    cosine_phase(a, b, d.y0)
}

fn cosine_sector(
    p: &PhysicalParams,
    l: i64,
    n_max: usize,
    opts: &ScanOptions,
) -> Result<(Sector, Vec<EnergyLevel>), SpectrumError> {
    let pl = p.with_l(l);
    let d = derive(&pl)?;
    let window = scan_window(&pl, &d, n_max, opts)?;
    let map = d.tau_map();
    let tau_ceiling = map.tau(window.e_ceiling);
    if !(tau_ceiling > 0.0) {
        return Err(SpectrumError::NoRootsFound {
            l,
            e_floor: window.e_floor,
            e_ceiling: window.e_ceiling,
        });
    }
    let mw = d.m * d.omega;
    let tau_peak = 2.0 * mw * d.y0 / (PI * PI);

    // the phase rises on (0, τ_peak] and falls beyond it
    let mut pieces = vec![(0.0, tau_peak.min(tau_ceiling))];
    if tau_ceiling > tau_peak {
        pieces.push((tau_peak, tau_ceiling));
    }
    let mut roots: Vec<(f64, f64)> = Vec::new();
    for (lo, hi) in pieces {
        let (plo, phi) = (phase_at(lo, &d)?, phase_at(hi, &d)?);
        let (pmin, pmax) = (plo.min(phi), plo.max(phi));
        let j_first = ((pmin - FRAC_PI_2) / PI).ceil() as i64;
        let j_last = ((pmax - FRAC_PI_2) / PI).floor() as i64;
        for j in j_first..=j_last {
            let target = FRAC_PI_2 + j as f64 * PI;
            if lo == 0.0 && target == plo {
                continue;
            }
            let (tau, res) = bisect_phase(&d, lo, hi, target)?;
            roots.push((map.energy(tau), res));
        }
    }
    roots.sort_by(|x, y| x.0.total_cmp(&y.0));
    roots.dedup_by(|x, y| (x.0 - y.0).abs() <= DEDUP_TOL * d.omega);
    if roots.is_empty() {
        return Err(SpectrumError::NoRootsFound {
            l,
            e_floor: window.e_floor,
            e_ceiling: window.e_ceiling,
        });
    }
    let roots_found = roots.len();
    let levels = roots
        .into_iter()
        .take(n_max)
        .enumerate()
        .map(|(n, (energy, residual))| EnergyLevel {
            n,
            l,
            branch: Branch::Exact,
            method: Method::Cosine,
            energy,
            residual: Some(residual),
        })
        .collect();
    Ok((
        Sector {
            l,
            derived: d,
            window: Some(window),
            roots_found,
        },
        levels,
    ))
}

/// Bisection for `phase(τ) = target` on a piece where the phase is monotone.
fn bisect_phase(
    d: &DerivedParams,
    mut lo: f64,
    mut hi: f64,
    target: f64,
) -> Result<(f64, f64), SpecFunError> {
    let mut flo = phase_at(lo, d)? - target;
    let fhi = phase_at(hi, d)? - target;
    if flo == 0.0 {
        return Ok((lo, 0.0));
    }
    if fhi == 0.0 {
        return Ok((hi, 0.0));
    }
    let mut best = (0.5 * (lo + hi), f64::INFINITY);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = phase_at(mid, d)? - target;
        if fm.abs() < best.1 {
            best = (mid, fm.abs());
        }
        if fm.abs() <= PHASE_TOL || mid <= lo || mid >= hi {
            break;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(best)
}

/// Uniform radial grid with `intervals + 1` nodes on `[r0, r_max]`.
pub fn uniform_grid(r0: f64, r_max: f64, intervals: usize) -> Vec<f64> {
    let h = (r_max - r0) / intervals as f64;
    (0..=intervals).map(|i| r0 + i as f64 * h).collect()
}

/// Outer radius that comfortably contains level `n`.
pub fn default_r_max(d: &DerivedParams, r0: f64, n: usize) -> f64 {
    classical_radius(d, r0, n + 1) * 6.0
}

/// `u(r) = e^{−y/2} y^{|γ|/2} U(a, |γ| + 1; y)` on a uniform grid, scaled so
/// that `∫|u|² r dr = 1` by Simpson's rule.
pub fn radial_wavefunction(
    level: &EnergyLevel,
    d: &DerivedParams,
    r_grid: &[f64],
) -> Result<Vec<f64>, SpectrumError> {
    if level.method != Method::Exact {
        return Err(SpectrumError::InvalidInput(
            "wavefunctions need a root-found level".into(),
        ));
    }
    if r_grid.len() < 3 || r_grid.len().is_multiple_of(2) {
        return Err(SpectrumError::InvalidInput(
            "Simpson's rule needs an odd number (>= 3) of grid points".into(),
        ));
    }
    let h = r_grid[1] - r_grid[0];
    let uniform = r_grid
        .windows(2)
        .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.abs().max(w[1].abs()));
    if !(h > 0.0) || !uniform {
        return Err(SpectrumError::InvalidInput(
            "r_grid must be uniform and increasing".into(),
        ));
    }
    if r_grid[0] <= 0.0 {
        return Err(SpectrumError::InvalidInput(
            "r_grid must lie in r > 0".into(),
        ));
    }
    let (a, b) = u_parameters(level.energy, d);
    let g = d.gamma.abs();
    let mut u = Vec::with_capacity(r_grid.len());
    let mut err = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        let y = d.y_of_r(r);
        let pref = (-0.5 * y + 0.5 * g * y.ln()).exp();
        let val = tricomi_u_unchecked(a, b, y)?;
        u.push(pref * val.value);
        err.push(pref * val.abs_error_estimate);
    }
    let peak = u.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let worst = err.iter().cloned().fold(0.0, f64::max);
    if !(peak > 0.0) || worst > 1e-8 * peak {
        return Err(SpecFunError::Accuracy {
            value: peak,
            abs_error: worst,
        }
        .into());
    }
    let density: Vec<f64> = u.iter().zip(r_grid).map(|(v, r)| v * v * r).collect();
    let norm = simpson_uniform(&density, h).unwrap_or(0.0);
    if !(norm > 0.0) {
        return Err(SpectrumError::InvalidInput(
            "wavefunction has zero norm on r_grid".into(),
        ));
    }
    let scale = norm.sqrt().recip();
    Ok(u.into_iter().map(|v| v * scale).collect())
}
