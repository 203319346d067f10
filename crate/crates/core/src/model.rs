//! Physical inputs and the parameters derived from them.
//!
//! The field is `B0 ẑ` for `r > r0` and zero inside the core. With the
//! dislocation metric `ds² = dr² + r²dφ² + (dz + β dφ)²` and the ansatz
//! `ψ = e^{ilφ + ikz} u(r)`, the Schrödinger equation reduces to
//!
//! ```text
//! u'' + u'/r − γ²/r²·u − m²ω²r²/4·u + τ·u = 0
//! ω = qB0/m,  γ = l − βk + qς/(2π),  τ = 2mE + mωγ − k²,  ς = B0πr0²
//! ```
//!
//! Negative charges give `ω < 0` and are rejected; the map
//! `(q, l, β) → (−q, −l, −β)` sends `(ω, γ) → (−ω, −γ)`, which leaves the
//! radial equation and `τ ↔ E` unchanged, so a hole problem is solved as its
//! [`PhysicalParams::charge_conjugate`].

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid parameter {field}: {constraint}")]
    InvalidParams {
        field: &'static str,
        constraint: String,
    },
    #[error("radius out of domain: {0}")]
    Domain(String),
}

fn invalid(field: &'static str, constraint: impl Into<String>) -> ModelError {
    ModelError::InvalidParams {
        field,
        constraint: constraint.into(),
    }
}

/// Primitive inputs, natural units `ħ = c = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    pub m: f64,
    pub q: f64,
    #[serde(rename = "B0")]
    pub b0: f64,
    pub r0: f64,
    /// Dislocation parameter, `β = b/2π` for Burgers vector `b`.
    pub beta: f64,
    /// Longitudinal wavenumber.
    pub k: f64,
    /// Angular quantum number.
    pub l: i64,
}

impl PhysicalParams {
    /// Standard test point `m = q = B0 = r0 = 1`, no dislocation, `k = l = 0`.
    pub fn standard() -> Self {
        Self {
            m: 1.0,
            q: 1.0,
            b0: 1.0,
            r0: 1.0,
            beta: 0.0,
            k: 0.0,
            l: 0,
        }
    }

    pub fn with_l(self, l: i64) -> Self {
        Self { l, ..self }
    }

    pub fn with_b0(self, b0: f64) -> Self {
        Self { b0, ..self }
    }

    /// Dislocation parameter from a Burgers vector length.
    pub fn beta_from_burgers(b: f64) -> f64 {
        b / (2.0 * PI)
    }

    /// Hole → electron map `(q, l, β) → (−q, −l, −β)`; same spectrum.
    pub fn charge_conjugate(self) -> Self {
        Self {
            q: -self.q,
            l: -self.l,
            beta: -self.beta,
            ..self
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        for (field, v) in [
            ("m", self.m),
            ("q", self.q),
            ("B0", self.b0),
            ("r0", self.r0),
            ("beta", self.beta),
            ("k", self.k),
        ] {
            if !v.is_finite() {
                return Err(invalid(field, "must be finite"));
            }
        }
        if self.m <= 0.0 {
            return Err(invalid("m", "m must be > 0"));
        }
        if self.b0 <= 0.0 {
            return Err(invalid("B0", "B0 must be > 0"));
        }
        if self.r0 <= 0.0 {
            return Err(invalid("r0", "r0 must be > 0"));
        }
        if self.q * self.b0 / self.m <= 0.0 {
            return Err(invalid(
                "q",
                "omega = q*B0/m must be > 0 (solve a negative charge as its charge conjugate)",
            ));
        }
        Ok(())
    }

    /// Missing flux `ς = B0·π·r0²`.
    pub fn missing_flux(&self) -> f64 {
        self.b0 * PI * self.r0 * self.r0
    }

    /// Missing flux in units of the flux quantum `2π/|q|`.
    pub fn flux_quanta(&self) -> f64 {
        self.missing_flux() * self.q.abs() / (2.0 * PI)
    }

    /// `B0` that produces missing flux `sigma` at this core radius.
    pub fn b0_for_flux(&self, sigma: f64) -> f64 {
        sigma / (PI * self.r0 * self.r0)
    }
}

/// Parameters of the reduced radial problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedParams {
    /// Cyclotron frequency `qB0/m`.
    pub omega: f64,
    /// Missing flux `B0πr0²`.
    pub sigma_flux: f64,
    /// Effective angular momentum `l − βk + qς/(2π)`.
    pub gamma: f64,
    /// Hard-wall position in `y = mωr²/2`.
    pub y0: f64,
    pub m: f64,
    pub k: f64,
}

impl DerivedParams {
    pub fn tau_map(&self) -> TauEnergyMap {
        TauEnergyMap {
            m: self.m,
            omega: self.omega,
            gamma: self.gamma,
            k: self.k,
        }
    }

    /// Missing flux in units of the flux quantum `2π/|q|`.
    pub fn flux_quanta(&self, q: f64) -> f64 {
        self.sigma_flux * q.abs() / (2.0 * PI)
    }

    /// `y = mωr²/2`.
    pub fn y_of_r(&self, r: f64) -> f64 {
        0.5 * self.m * self.omega * r * r
    }

    pub fn r_of_y(&self, y: f64) -> f64 {
        (2.0 * y / (self.m * self.omega)).sqrt()
    }
}

/// Exact `τ ↔ E` correspondence `τ = 2mE + mωγ − k²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauEnergyMap {
    pub m: f64,
    pub omega: f64,
    pub gamma: f64,
    pub k: f64,
}

impl TauEnergyMap {
    pub fn tau(&self, energy: f64) -> f64 {
        2.0 * self.m * energy + self.m * self.omega * self.gamma - self.k * self.k
    }

    pub fn energy(&self, tau: f64) -> f64 {
        (tau - self.m * self.omega * self.gamma + self.k * self.k) / (2.0 * self.m)
    }
}

pub fn derive(p: &PhysicalParams) -> Result<DerivedParams, ModelError> {
    p.validate()?;
    let omega = p.q * p.b0 / p.m;
    let sigma_flux = p.missing_flux();
    let gamma = p.l as f64 - p.beta * p.k + p.q * sigma_flux / (2.0 * PI);
    let y0 = 0.5 * p.m * omega * p.r0 * p.r0;
    Ok(DerivedParams {
        omega,
        sigma_flux,
        gamma,
        y0,
        m: p.m,
        k: p.k,
    })
}

/// Azimuthal vector potential: zero inside the core, `B0(r² − r0²)/(2r)`
/// outside.
pub fn vector_potential(p: &PhysicalParams, r: f64) -> Result<f64, ModelError> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(ModelError::Domain(format!("r must be > 0, got {r}")));
    }
    if r <= p.r0 {
        return Ok(0.0);
    }
    Ok(p.b0 * (r * r - p.r0 * p.r0) / (2.0 * r))
}

/// The `r`-dependent part of the radial equation,
/// `u'' + u'/r + (τ − V_eff(r))·u = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialCoefficients {
    pub gamma: f64,
    pub m: f64,
    pub omega: f64,
}

impl RadialCoefficients {
    /// `V_eff(r) = γ²/r² + m²ω²r²/4`.
    pub fn v_eff(&self, r: f64) -> f64 {
        let mw = self.m * self.omega;
        self.gamma * self.gamma / (r * r) + 0.25 * mw * mw * r * r
    }

    /// Potential of the symmetrized problem for `f = √r·u`:
    /// `−f'' + [(γ² − 1/4)/r² + m²ω²r²/4]·f = τ·f`.
    pub fn symmetrized(&self, r: f64) -> f64 {
        let mw = self.m * self.omega;
        (self.gamma * self.gamma - 0.25) / (r * r) + 0.25 * mw * mw * r * r
    }

    /// Location and value of the minimum of `V_eff` (`γ ≠ 0`).
    pub fn v_eff_minimum(&self) -> (f64, f64) {
        let mw = (self.m * self.omega).abs();
        let r = (2.0 * self.gamma.abs() / mw).sqrt();
        (r, mw * self.gamma.abs())
    }
}

pub fn radial_coefficients(d: &DerivedParams) -> RadialCoefficients {
    RadialCoefficients {
        gamma: d.gamma,
        m: d.m,
        omega: d.omega,
    }
}
