//! Persistent currents `I = −Σ ∂E/∂ς` carried by occupied states.
//!
//! Two routes:
//!
//! - [`current_from_formula`] differentiates the closed-form levels
//!   analytically, holding `ω` fixed, so each occupied state contributes
//!
//!   ```text
//!   qω/4π − qω/π³ ∓ [(qω/π³)√D + ω(4n+1)/(4ς√D)],   D = 1 − π³(4n+1)/(2qς)
//!   ```
//!
//!   with the upper sign for the plus branch;
//! - [`current_from_spectrum`] takes a central difference of root-found
//!   levels in `ς`, changing `B0` at fixed `r0`. Along that family `ω`
//!   changes with `ς`, so the two routes answer different questions and are
//!   reported side by side.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{ModelError, PhysicalParams};
use crate::spectrum::{
    branch_sign, find_exact_levels, Branch, ClosedForm, ScanOptions, SpectrumError,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CurrentsError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("state n = {n} violates the restriction (discriminant {discriminant})")]
    RestrictionViolated { n: usize, discriminant: f64 },
    #[error("state (n = {n}, l = {l}) has no partner across the flux step")]
    StateLost { n: usize, l: i64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OccupiedState {
    pub n: usize,
    pub l: i64,
    /// Closed-form branch; ignored by the spectrum route.
    #[serde(default)]
    pub branch: Option<Branch>,
}

/// Distinct occupied `(n, l)` states.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct OccupationSet {
    states: Vec<OccupiedState>,
}

impl OccupationSet {
    pub fn new(states: Vec<OccupiedState>) -> Result<Self, CurrentsError> {
        let mut seen = std::collections::BTreeSet::new();
        for s in &states {
            if !seen.insert((s.n, s.l)) {
                return Err(CurrentsError::InvalidInput(format!(
                    "state (n = {}, l = {}) listed twice",
                    s.n, s.l
                )));
            }
        }
        Ok(Self { states })
    }

    pub fn states(&self) -> &[OccupiedState] {
        &self.states
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// `−∂E/∂ς` of one closed-form level at fixed `ω`.
pub fn formula_summand(cf: &ClosedForm, n: usize, branch: Branch) -> Result<f64, CurrentsError> {
    let sign = branch_sign(branch)?;
    let disc = cf.discriminant(n);
    if !(disc > 0.0) {
        return Err(CurrentsError::RestrictionViolated {
            n,
            discriminant: disc,
        });
    }
    let (q, w, s) = (cf.q, cf.omega, cf.sigma_flux);
    let root = disc.sqrt();
    let pi3 = PI.powi(3);
    let bracket = q * w / pi3 * root + w * (4.0 * n as f64 + 1.0) / (4.0 * s * root);
    Ok(q * w / (4.0 * PI) - q * w / pi3 - sign * bracket)
}

/// Sum of [`formula_summand`] over the occupied states; every state needs a
/// branch tag.
pub fn current_from_formula(p: &PhysicalParams, occ: &OccupationSet) -> Result<f64, CurrentsError> {
    let cf = ClosedForm::from_params(p)?;
    occ.states().iter().try_fold(0.0, |acc, s| {
        let branch = s.branch.ok_or_else(|| {
            CurrentsError::InvalidInput(format!("state (n = {}, l = {}) has no branch", s.n, s.l))
        })?;
        Ok(acc + formula_summand(&cf, s.n, branch)?)
    })
}

/// Central difference `−[E(ς + h) − E(ς − h)]/(2h)` of a closed-form level
/// at fixed `ω`.
///
/// The terms linear in `ς` are differenced exactly, and
/// `(ς+h)√D₊ − (ς−h)√D₋` is formed as `(A − B)/(√A + √B)` with
/// `A − B = 2h(2ς − c)` worked out by hand, so the result keeps full
/// precision down to `h ~ 1e-8·ς`.
pub fn closed_form_flux_slope(
    cf: &ClosedForm,
    n: usize,
    branch: Branch,
    h: f64,
) -> Result<f64, CurrentsError> {
    let sign = branch_sign(branch)?;
    let s = cf.sigma_flux;
    if !(h > 0.0 && h < s) {
        return Err(CurrentsError::InvalidInput(format!(
            "step {h} outside (0, {s})"
        )));
    }
    for side in [s - h, s + h] {
        let disc = cf.with_flux(side).discriminant(n);
        if !(disc > 0.0) {
            return Err(CurrentsError::RestrictionViolated {
                n,
                discriminant: disc,
            });
        }
    }
    let (q, w) = (cf.q, cf.omega);
    let pi3 = PI.powi(3);
    // ς√D = √(ς² − cς)
    let c = pi3 * (4.0 * n as f64 + 1.0) / (2.0 * q);
    let a = (s + h) * (s + h - c);
    let b = (s - h) * (s - h - c);
    let nonlinear = (2.0 * s - c) / (a.sqrt() + b.sqrt());
    let linear = -w * q / (4.0 * PI) + q * w / pi3;
    Ok(-(linear + sign * q * w / pi3 * nonlinear))
}

/// The same central difference taken directly on the energies.
pub fn closed_form_flux_slope_naive(
    cf: &ClosedForm,
    n: usize,
    branch: Branch,
    h: f64,
) -> Result<f64, CurrentsError> {
    let s = cf.sigma_flux;
    let up = cf.with_flux(s + h).energy(n, branch)?;
    let down = cf.with_flux(s - h).energy(n, branch)?;
    Ok(-(up - down) / (2.0 * h))
}

/// `−Σ [E(ς + dς) − E(ς − dς)]/(2dς)` over occupied states, with levels
/// root-found at both fluxes and matched by `(n, l)`.
pub fn current_from_spectrum(
    p: &PhysicalParams,
    occ: &OccupationSet,
    dsigma: f64,
    opts: &ScanOptions,
) -> Result<f64, CurrentsError> {
    p.validate()?;
    if occ.is_empty() {
        return Ok(0.0);
    }
    let sigma = p.missing_flux();
    if !(dsigma > 0.0 && dsigma <= sigma / 100.0) {
        return Err(CurrentsError::InvalidInput(format!(
            "dsigma = {dsigma} outside (0, {}]",
            sigma / 100.0
        )));
    }
    let mut n_per_l: BTreeMap<i64, usize> = BTreeMap::new();
    for s in occ.states() {
        let e = n_per_l.entry(s.l).or_insert(0);
        *e = (*e).max(s.n + 1);
    }
    let l_list: Vec<i64> = n_per_l.keys().copied().collect();
    let n_max = *n_per_l.values().max().unwrap_or(&1);

    let down = p.with_b0(p.b0_for_flux(sigma - dsigma));
    let up = p.with_b0(p.b0_for_flux(sigma + dsigma));
    let (lo, hi) = rayon::join(
        || find_exact_levels(&down, n_max, &l_list, opts),
        || find_exact_levels(&up, n_max, &l_list, opts),
    );
    let (lo, hi) = (lo?, hi?);

    let mut total = 0.0;
    for s in occ.states() {
        let e_lo = lo.energies(s.l, Branch::Exact).get(s.n).copied();
        let e_hi = hi.energies(s.l, Branch::Exact).get(s.n).copied();
        match (e_lo, e_hi) {
            (Some(a), Some(b)) => total -= (b - a) / (2.0 * dsigma),
            _ => return Err(CurrentsError::StateLost { n: s.n, l: s.l }),
        }
    }
    Ok(total)
}
