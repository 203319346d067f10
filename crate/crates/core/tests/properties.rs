use std::f64::consts::PI;

use dislocation_core::currents::{closed_form_flux_slope, current_from_formula, formula_summand};
use dislocation_core::model::{derive, PhysicalParams};
use dislocation_core::oracle::{solve_radial_eigenproblem, OracleConfig};
use dislocation_core::specfun::{
    asymptotic_u_large_a, kummer_m, tricomi_u, tricomi_u_unchecked, SpecFunError,
};
use dislocation_core::spectrum::{
    asymptotic_levels, discriminant, find_exact_levels, quantization_function, Branch, ClosedForm,
    ScanOptions, SpectrumError,
};
use dislocation_core::{OccupationSet, OccupiedState};
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn params(l: i64, beta: f64, k: f64, b0: f64, r0: f64) -> PhysicalParams {
    PhysicalParams {
        l,
        beta,
        k,
        b0,
        r0,
        ..PhysicalParams::standard()
    }
}

/// Zeros of `f` on `[lo, hi]`, scanning downward from `hi` and bisecting.
fn zeros(f: impl Fn(f64) -> f64, lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let (mut a, mut fa) = (hi, f(hi));
    while a > lo {
        let b = a - step;
        let fb = f(b);
        if fa * fb < 0.0 {
            let (mut x0, mut x1) = (b, a);
            for _ in 0..80 {
                let m = 0.5 * (x0 + x1);
                if f(m) * f(x0) < 0.0 {
                    x1 = m;
                } else {
                    x0 = m;
                }
            }
            out.push(0.5 * (x0 + x1));
        }
        a = b;
        fa = fb;
    }
    out
}

#[test]
fn asymptotic_zeros_approach_tricomi_zeros() {
    let (b, y0) = (2.0, 0.5);
    let u = zeros(
        |a| tricomi_u_unchecked(a, b, y0).unwrap().value,
        -30.0,
        0.9,
        0.01,
    );
    let c = zeros(
        |a| asymptotic_u_large_a(a, b, y0).unwrap(),
        -30.0,
        0.9,
        0.01,
    );
    assert_eq!(u.len(), 28);
    assert_eq!(c.len(), 28);
    // 30-digit zeros of U(a, 2; 1/2)
    for (i, want) in [
        (0, -0.3269344408594441),
        (3, -3.7657492269974133),
        (27, -29.238964091761886),
    ] {
        assert!((u[i] - want).abs() < 1e-10, "zero {i}: {} vs {want}", u[i]);
    }
    let gaps: Vec<f64> = u.iter().zip(&c).map(|(x, y)| rel(*y, *x)).collect();
    assert!(gaps[3..].windows(2).all(|w| w[1] <= w[0]), "{gaps:?}");
}

proptest! {
    #[test]
    fn specfun_results_are_finite_or_errors(a in -40.0f64..40.0, b in -10.0f64..40.0, y in 1e-3f64..200.0) {
        for r in [kummer_m(a, b, y), tricomi_u(a, b, y)] {
            match r {
                Ok(v) => prop_assert!(v.value.is_finite() && v.abs_error_estimate.is_finite() && v.abs_error_estimate >= 0.0),
                Err(SpecFunError::Pole { .. } | SpecFunError::Overflow { .. } | SpecFunError::Accuracy { .. }) => {}
                Err(e) => prop_assert!(false, "unexpected {e}"),
            }
        }
    }

    #[test]
    fn u_power_identity(a in 0.1f64..5.0, y in 0.1f64..20.0) {
        let u = tricomi_u(a, a + 1.0, y).unwrap().value;
        prop_assert!(rel(u, y.powf(-a)) <= 1e-10);
    }

    #[test]
    fn kummer_contiguous_relation(a in -5.0f64..5.0, b in 0.5f64..6.0, y in 0.0f64..20.0) {
        let m = |a| kummer_m(a, b, y).unwrap().value;
        let terms = [(b - a) * m(a - 1.0), (2.0 * a - b + y) * m(a), -a * m(a + 1.0)];
        let scale = terms.iter().fold(0.0f64, |s, t| s.max(t.abs()));
        prop_assert!((terms.iter().sum::<f64>() / scale).abs() <= 1e-9);
    }

    #[test]
    fn derived_params_depend_on_l_minus_beta_k(
        l in -4i64..4, beta in -1.0f64..1.0, k in -2.0f64..2.0, shift in -3i64..3,
        b0 in 0.2f64..3.0, r0 in 0.2f64..2.0,
    ) {
        prop_assume!(k != 0.0);
        let a = derive(&params(l, beta, k, b0, r0)).unwrap();
        let b = derive(&params(l + shift, beta + shift as f64 / k, k, b0, r0)).unwrap();
        prop_assert!((a.gamma - b.gamma).abs() <= 1e-12 * (1.0 + a.gamma.abs()));
        prop_assert_eq!(a.sigma_flux, b.sigma_flux);
        prop_assert_eq!(a.omega, b.omega);
        prop_assert_eq!(a.y0, b.y0);
        prop_assert!(a.y0 > 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn exact_levels_are_ordered_distinct_and_small_residual(
        l in -3i64..4, beta in 0.0f64..1.0, k in 0.0f64..2.0, b0 in 0.3f64..3.0, r0 in 0.3f64..1.5,
    ) {
        let p = params(l, beta, k, b0, r0);
        let d = derive(&p).unwrap();
        let res = find_exact_levels(&p, 4, &[l], &ScanOptions::default()).unwrap();
        let e = res.energies(l, Branch::Exact);
        prop_assert_eq!(e.len(), 4);
        prop_assert!(e.windows(2).all(|w| w[1] - w[0] > 1e-10 * d.omega));
        // |U| at the root against |U| at the ends of its scan cell
        let w = res.sectors[0].window.unwrap();
        for lev in &res.levels {
            let lo = w.e_floor + ((lev.energy - w.e_floor) / w.step).floor() * w.step;
            let scale = quantization_function(lo, &d).unwrap().abs().max(quantization_function(lo + w.step, &d).unwrap().abs());
            prop_assert!(lev.residual.unwrap() <= 1e-9 * scale);
        }
    }

    #[test]
    fn equal_gamma_gives_equal_spectra(l in -3i64..3, shift in 1i64..3, k in 0.5f64..2.5, b0 in 0.3f64..2.0) {
        let a = params(l, 0.1, k, b0, 1.0);
        let b = params(l + shift, 0.1 + shift as f64 / k, k, b0, 1.0);
        prop_assume!((derive(&a).unwrap().gamma - derive(&b).unwrap().gamma).abs() == 0.0);
        let opts = ScanOptions::default();
        let ea = find_exact_levels(&a, 3, &[a.l], &opts).unwrap().energies(a.l, Branch::Exact);
        let eb = find_exact_levels(&b, 3, &[b.l], &opts).unwrap().energies(b.l, Branch::Exact);
        for (x, y) in ea.iter().zip(&eb) {
            prop_assert!(rel(*x, *y) <= 1e-10);
        }
    }

    #[test]
    fn exact_levels_sit_on_the_oracle(l in -2i64..3, beta in 0.0f64..0.8, k in 0.0f64..1.5, b0 in 0.5f64..2.0) {
        let p = params(l, beta, k, b0, 1.0);
        let d = derive(&p).unwrap();
        let o = solve_radial_eigenproblem(&d, &p, 2, &OracleConfig::default()).unwrap();
        let e = find_exact_levels(&p, 2, &[l], &ScanOptions::default()).unwrap().energies(l, Branch::Exact);
        for (x, y) in e.iter().zip(&o) {
            prop_assert!((x - y.energy).abs() <= 1e-6 * d.omega);
        }
    }

    #[test]
    fn oracle_ground_state_above_potential_minimum(l in 1i64..5, b0 in 0.3f64..3.0, r0 in 0.3f64..1.5) {
        let p = params(l, 0.0, 0.0, b0, r0);
        let d = derive(&p).unwrap();
        prop_assume!(d.gamma * d.gamma >= 0.25);
        let o = solve_radial_eigenproblem(&d, &p, 1, &OracleConfig::default()).unwrap();
        // min over r ≥ r0 of (γ² − 1/4)/r² + m²ω²r²/4
        let c = d.gamma * d.gamma - 0.25;
        let mw = d.m * d.omega;
        let r_star = (4.0 * c / (mw * mw)).sqrt().sqrt().max(r0);
        let w_min = c / (r_star * r_star) + mw * mw * r_star * r_star / 4.0;
        prop_assert!(o[0].tau >= w_min - 1e-9 * w_min.abs());
    }
}

proptest! {
    #[test]
    fn asymptotic_levels_respect_restriction(sigma in 1.0f64..400.0, l in -2i64..3) {
        let p = PhysicalParams::standard().with_l(l);
        let p = p.with_b0(p.b0_for_flux(sigma));
        match asymptotic_levels(&p, 8, &[l]) {
            Ok(res) => {
                for lev in &res.levels {
                    prop_assert!(discriminant(p.q, sigma, lev.n) >= 0.0);
                }
                for &(_, n) in &res.skipped {
                    prop_assert!(discriminant(p.q, sigma, n) <= 0.0);
                }
            }
            Err(SpectrumError::RestrictionViolated { .. }) => prop_assert!(discriminant(p.q, sigma, 0) <= 0.0),
            Err(e) => prop_assert!(false, "unexpected {e}"),
        }
    }

    #[test]
    fn formula_current_ignores_beta(beta1 in -3.0f64..3.0, beta2 in -3.0f64..3.0, k in -2.0f64..2.0, n in 0usize..2) {
        let base = PhysicalParams::standard();
        let base = base.with_b0(base.b0_for_flux(4.0 * PI.powi(3)));
        let occ = OccupationSet::new(vec![OccupiedState { n, l: 0, branch: Some(Branch::Minus) }]).unwrap();
        let a = current_from_formula(&PhysicalParams { beta: beta1, k, ..base }, &occ).unwrap();
        let b = current_from_formula(&PhysicalParams { beta: beta2, k, ..base }, &occ).unwrap();
        prop_assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn summand_is_the_flux_derivative(factor in 4.5f64..40.0, n in 0usize..2, plus in any::<bool>()) {
        let p = PhysicalParams::standard();
        let p = p.with_b0(p.b0_for_flux(factor * PI.powi(3)));
        let cf = ClosedForm::from_params(&p).unwrap();
        prop_assume!(cf.discriminant(n) > 1e-3);
        let branch = if plus { Branch::Plus } else { Branch::Minus };
        let exact = formula_summand(&cf, n, branch).unwrap();
        let fd = closed_form_flux_slope(&cf, n, branch, 1e-5 * cf.sigma_flux).unwrap();
        prop_assert!(rel(fd, exact) <= 1e-7, "{fd} vs {exact}");
    }
}
