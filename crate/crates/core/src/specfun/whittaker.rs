use super::tricomi::tricomi_u;
use super::{check_finite, SpecFunError, SpecFunResult};

/// Whittaker's `W_{κ,ν}(y) = e^{-y/2} y^{1/2+ν} U(1/2+ν−κ, 1+2ν; y)`.
pub fn whittaker_w(kappa: f64, nu: f64, y: f64) -> Result<SpecFunResult, SpecFunError> {
    check_finite(&[("kappa", kappa), ("nu", nu), ("y", y)])?;
    if nu < 0.0 {
        return Err(SpecFunError::Domain(format!("nu must be >= 0, got {nu}")));
    }
    if y <= 0.0 {
        return Err(SpecFunError::Domain(format!("W requires y > 0, got {y}")));
    }
    let u = tricomi_u(0.5 + nu - kappa, 1.0 + 2.0 * nu, y)?;
    let factor = (-0.5 * y + (0.5 + nu) * y.ln()).exp();
    SpecFunResult::new(
        factor * u.value,
        factor * u.abs_error_estimate + 2.0 * f64::EPSILON * (factor * u.value).abs(),
        u.method_used,
    )
    .ensure_finite("W(kappa, nu; y)")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_u_factor() {
        let nu = 0.75;
        let kappa = 0.5 + nu;
        let w = whittaker_w(kappa, nu, 1.0).unwrap();
        assert!((w.value - (-0.5f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn leading_decay() {
        // W_{0,0}(y) = e^{-y/2} y^{1/2} U(1/2, 1; y) and U(1/2, 1; y) ~ y^{-1/2}
        let ratio = |y: f64| whittaker_w(0.0, 0.0, y).unwrap().value / (-0.5 * y).exp();
        let r1 = ratio(30.0);
        let r2 = ratio(120.0);
        assert!((r2 - 1.0).abs() < (r1 - 1.0).abs());
        assert!((r2 - 1.0).abs() < 5e-3);
    }

    #[test]
    fn negative_nu_rejected() {
        assert!(whittaker_w(0.0, -0.1, 1.0).is_err());
    }
}
