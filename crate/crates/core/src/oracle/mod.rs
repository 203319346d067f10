//! Finite-difference reference solver for the radial equation.
//!
//! With `u = f/√r` the radial equation becomes the self-adjoint problem
//!
//! ```text
//! −f'' + [(γ² − 1/4)/r² + m²ω²r²/4]·f = τ·f,   f(r0) = f(R_max) = 0
//! ```
//!
//! Central differences on a uniform grid turn it into a symmetric
//! tridiagonal eigenproblem, solved by Sturm bisection. Nothing here uses
//! the special functions, so the solver is an independent check on the
//! hard-wall quantization.

mod tridiag;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{radial_coefficients, DerivedParams, ModelError, PhysicalParams};
pub use tridiag::{sign_changes, SymTridiagonal};

/// Richardson error above this (in units of `ω`) means the grid is too coarse.
pub const GRID_TOLERANCE: f64 = 1e-5;
/// Eigenvalue drift (units of `ω`) allowed when `R_max` is doubled.
pub const DOMAIN_TOLERANCE: f64 = 1e-8;
/// Accepted range for the fitted convergence order.
pub const ORDER_RANGE: (f64, f64) = (1.8, 2.2);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("invalid oracle configuration: {0}")]
    InvalidConfig(String),
    #[error("grid too coarse: Richardson estimate {estimate:e} exceeds {tolerance:e}")]
    GridTooCoarse { estimate: f64, tolerance: f64 },
    #[error("domain not converged: doubling R_max moved level {n} by {shift:e}")]
    DomainNotConverged { n: usize, shift: f64 },
    #[error("fitted convergence order {order} outside [1.8, 2.2]")]
    OrderOutOfRange { order: f64 },
    #[error("grid has fewer interior points than requested levels")]
    TooFewPoints,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleConfig {
    /// Number of grid intervals on `[r0, R_max]`.
    pub grid_points: usize,
    /// `R_max = r_classical · r_max_factor`.
    pub r_max_factor: f64,
    /// Repeat at half resolution and extrapolate in `h²`.
    pub richardson: bool,
    /// Re-solve with `R_max` doubled (same step) and require agreement.
    pub domain_check: bool,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            grid_points: 20_000,
            r_max_factor: 6.0,
            richardson: true,
            domain_check: true,
        }
    }
}

impl OracleConfig {
    /// Cheap single-resolution settings for bracketing estimates.
    pub fn coarse() -> Self {
        Self {
            grid_points: 2_000,
            r_max_factor: 6.0,
            richardson: false,
            domain_check: false,
        }
    }

    pub fn validate(&self) -> Result<(), OracleError> {
        if self.grid_points < 1_000 {
            return Err(OracleError::InvalidConfig(format!(
                "grid_points must be >= 1000, got {}",
                self.grid_points
            )));
        }
        if !(self.r_max_factor >= 3.0) {
            return Err(OracleError::InvalidConfig(format!(
                "r_max_factor must be >= 3, got {}",
                self.r_max_factor
            )));
        }
        Ok(())
    }
}

/// One reference level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleLevel {
    pub n: usize,
    pub tau: f64,
    pub energy: f64,
    /// `|E_extrapolated − E_fine|`; zero without Richardson.
    pub error_estimate: f64,
}

/// Discretized radial problem on `[r0, r_max]` with `intervals` panels.
#[derive(Debug, Clone)]
pub struct RadialGrid {
    pub r0: f64,
    pub r_max: f64,
    pub intervals: usize,
}

impl RadialGrid {
    pub fn step(&self) -> f64 {
        (self.r_max - self.r0) / self.intervals as f64
    }

    /// Interior nodes `r_i = r0 + i·h`, `i = 1..intervals-1`.
    pub fn interior(&self) -> Vec<f64> {
        let h = self.step();
        (1..self.intervals)
            .map(|i| self.r0 + i as f64 * h)
            .collect()
    }

    pub fn operator(&self, d: &DerivedParams) -> SymTridiagonal {
        let coeff = radial_coefficients(d);
        let h = self.step();
        let inv_h2 = 1.0 / (h * h);
        let nodes = self.interior();
        let diag: Vec<f64> = nodes
            .iter()
            .map(|&r| 2.0 * inv_h2 + coeff.symmetrized(r))
            .collect();
        let off = vec![-inv_h2; nodes.len().saturating_sub(1)];
        SymTridiagonal::new(diag, off)
    }
}

/// Outer classical turning point for the highest of `n_levels` states,
/// using a generous `τ` estimate that covers the hard-wall shift.
pub fn classical_radius(d: &DerivedParams, r0: f64, n_levels: usize) -> f64 {
    let coeff = radial_coefficients(d);
    let mw = (d.m * d.omega).abs();
    let (r_min, v_min) = if d.gamma != 0.0 {
        coeff.v_eff_minimum()
    } else {
        (0.0, 0.0)
    };
    let floor = if r_min > r0 { v_min } else { coeff.v_eff(r0) };
    let tau = floor + 2.0 * mw * (2.0 * n_levels as f64 + 1.0);
    let disc = (tau * tau - mw * mw * d.gamma * d.gamma).max(0.0);
    let r2 = 2.0 * (tau + disc.sqrt()) / (mw * mw);
    r2.sqrt().max(r0)
}

fn lowest_eigenvalues(
    grid: &RadialGrid,
    d: &DerivedParams,
    n: usize,
) -> Result<Vec<f64>, OracleError> {
    let op = grid.operator(d);
    if op.len() < n {
        return Err(OracleError::TooFewPoints);
    }
    Ok((0..n).filter_map(|k| op.eigenvalue(k)).collect())
}

/// Lowest `n_levels` eigenvalues of the radial problem with Dirichlet walls
/// at `r0` and `R_max`.
pub fn solve_radial_eigenproblem(
    d: &DerivedParams,
    p: &PhysicalParams,
    n_levels: usize,
    cfg: &OracleConfig,
) -> Result<Vec<OracleLevel>, OracleError> {
    cfg.validate()?;
    if n_levels == 0 {
        return Err(OracleError::InvalidConfig("n_levels must be >= 1".into()));
    }
    let map = d.tau_map();
    let r_max = classical_radius(d, p.r0, n_levels) * cfg.r_max_factor;
    let grid = RadialGrid {
        r0: p.r0,
        r_max,
        intervals: cfg.grid_points,
    };
    let fine = lowest_eigenvalues(&grid, d, n_levels)?;

    let (taus, errors) = if cfg.richardson {
        let coarse_grid = RadialGrid {
            intervals: cfg.grid_points / 2,
            ..grid.clone()
        };
        let coarse = lowest_eigenvalues(&coarse_grid, d, n_levels)?;
        let mut taus = Vec::with_capacity(n_levels);
        let mut errors = Vec::with_capacity(n_levels);
        for (f, c) in fine.iter().zip(&coarse) {
            let extrapolated = (4.0 * f - c) / 3.0;
            taus.push(extrapolated);
            errors.push((extrapolated - f).abs() / (2.0 * d.m));
        }
        (taus, errors)
    } else {
        (fine.clone(), vec![0.0; n_levels])
    };

    let worst = errors.iter().cloned().fold(0.0, f64::max);
    if worst > GRID_TOLERANCE * d.omega.abs() {
        return Err(OracleError::GridTooCoarse {
            estimate: worst,
            tolerance: GRID_TOLERANCE * d.omega.abs(),
        });
    }

    if cfg.domain_check {
        // same step, so only the truncation of the domain differs
        let h = grid.step();
        let intervals = ((2.0 * r_max - p.r0) / h).round() as usize;
        let wide = RadialGrid {
            r0: p.r0,
            r_max: p.r0 + intervals as f64 * h,
            intervals,
        };
        let wide_fine = lowest_eigenvalues(&wide, d, n_levels)?;
        for (n, (a, b)) in fine.iter().zip(&wide_fine).enumerate() {
            let shift = (a - b).abs() / (2.0 * d.m);
            if shift > DOMAIN_TOLERANCE * d.omega.abs() {
                return Err(OracleError::DomainNotConverged { n, shift });
            }
        }
    }

    Ok(taus
        .into_iter()
        .zip(errors)
        .enumerate()
        .map(|(n, (tau, error_estimate))| OracleLevel {
            n,
            tau,
            energy: map.energy(tau),
            error_estimate,
        })
        .collect())
}

/// Eigenfunction `f = √r·u` of the `n`-th level on the interior nodes.
pub fn eigenfunction(
    d: &DerivedParams,
    p: &PhysicalParams,
    n: usize,
    cfg: &OracleConfig,
) -> Result<(Vec<f64>, Vec<f64>), OracleError> {
    cfg.validate()?;
    let r_max = classical_radius(d, p.r0, n + 1) * cfg.r_max_factor;
    let grid = RadialGrid {
        r0: p.r0,
        r_max,
        intervals: cfg.grid_points,
    };
    let op = grid.operator(d);
    let lambda = op.eigenvalue(n).ok_or(OracleError::TooFewPoints)?;
    Ok((grid.interior(), op.eigenvector(lambda)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub step: f64,
    pub intervals: usize,
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    /// Richardson limit from the two finest grids.
    pub limit: f64,
    /// Least-squares slope of `log|E(h) − limit|` against `log h` over the
    /// three coarsest grids.
    pub fitted_order: f64,
}

/// Ground-state energy at `grid_points·{1/2, 1, 2, 4}` intervals and the
/// fitted order of convergence.
pub fn convergence_report(
    d: &DerivedParams,
    p: &PhysicalParams,
    cfg: &OracleConfig,
) -> Result<ConvergenceReport, OracleError> {
    cfg.validate()?;
    let map = d.tau_map();
    let r_max = classical_radius(d, p.r0, 1) * cfg.r_max_factor;
    let rows: Vec<ConvergenceRow> = [
        cfg.grid_points / 2,
        cfg.grid_points,
        2 * cfg.grid_points,
        4 * cfg.grid_points,
    ]
    .iter()
    .map(|&intervals| {
        let grid = RadialGrid {
            r0: p.r0,
            r_max,
            intervals,
        };
        let tau = lowest_eigenvalues(&grid, d, 1)?[0];
        Ok(ConvergenceRow {
            step: grid.step(),
            intervals,
            energy: map.energy(tau),
        })
    })
    .collect::<Result<_, OracleError>>()?;

    let limit = (4.0 * rows[3].energy - rows[2].energy) / 3.0;
    let pts: Vec<(f64, f64)> = rows[..3]
        .iter()
        .map(|r| (r.step.ln(), (r.energy - limit).abs().ln()))
        .collect();
    let fitted_order = least_squares_slope(&pts);
    if !(fitted_order >= ORDER_RANGE.0 && fitted_order <= ORDER_RANGE.1) {
        return Err(OracleError::OrderOutOfRange {
            order: fitted_order,
        });
    }
    Ok(ConvergenceReport {
        rows,
        limit,
        fitted_order,
    })
}

pub(crate) fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// Ground-state energy from a coarse solve, for bracketing.
pub fn ground_state_estimate(d: &DerivedParams, p: &PhysicalParams) -> Result<f64, OracleError> {
    Ok(solve_radial_eigenproblem(d, p, 1, &OracleConfig::coarse())?[0].energy)
}
