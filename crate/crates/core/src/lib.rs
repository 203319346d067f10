//! Charged particle in an inhomogeneous magnetic field around a thick screw
//! dislocation.
//!
//! The field is uniform (`B0`) outside a core of radius `r0` and vanishes
//! inside; the core is impenetrable. The crate provides
//!
//! - [`specfun`]: Kummer `M`, Tricomi `U`, Whittaker `W` and the large-`a`
//!   cosine form of `U`,
//! - [`model`]: physical inputs and the derived parameters (`ω`, `γ`, `ς`, `y0`),
//! - [`spectrum`]: hard-wall quantization, closed-form levels and radial
//!   wavefunctions,
//! - [`oracle`]: an independent finite-difference eigensolver for the radial
//!   equation,
//! - [`currents`]: persistent currents from the closed form and from
//!   numerically differentiated spectra.
//!
//! Units are natural, `ħ = c = 1`.

// `!(x > 0.0)` is used throughout to reject NaN along with the bound.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod currents;
pub mod model;
pub mod oracle;
pub mod quadrature;
pub mod specfun;
pub mod spectrum;

pub use currents::{current_from_formula, current_from_spectrum, OccupationSet, OccupiedState};
pub use model::{derive, DerivedParams, PhysicalParams};
pub use oracle::{solve_radial_eigenproblem, OracleConfig};
pub use spectrum::{
    asymptotic_levels, cosine_condition_levels, find_exact_levels, Branch, EnergyLevel, Method,
    ScanOptions, SpectrumResult,
};
