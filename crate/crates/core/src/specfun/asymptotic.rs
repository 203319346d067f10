use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use super::{check_finite, SpecFunError};

/// Phase `√(2by₀ − 4ay₀) − bπ/2 + aπ + π/4` of the large-`|a|` form of `U`.
pub fn cosine_phase(a: f64, b: f64, y0: f64) -> Result<f64, SpecFunError> {
    check_finite(&[("a", a), ("b", b), ("y0", y0)])?;
    if y0 <= 0.0 {
        return Err(SpecFunError::Domain(format!("y0 must be > 0, got {y0}")));
    }
    let radicand = 2.0 * b * y0 - 4.0 * a * y0;
    if radicand <= 0.0 {
        return Err(SpecFunError::Domain(format!(
            "2by0 - 4ay0 = {radicand} must be > 0"
        )));
    }
    Ok(radicand.sqrt() - b * FRAC_PI_2 + a * PI + FRAC_PI_4)
}

/// `cos(√(2by₀ − 4ay₀) − bπ/2 + aπ + π/4)`, the oscillatory shape of
/// `U(a, b; y₀)` for large `|a|` up to a positive factor (taken as 1 here;
/// only the zeros are used).
pub fn asymptotic_u_large_a(a: f64, b: f64, y0: f64) -> Result<f64, SpecFunError> {
    cosine_phase(a, b, y0).map(f64::cos)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_phase_gives_one() {
        // pick y0 so that √(2by0 − 4ay0) = bπ/2 − aπ − π/4
        let (a, b) = (-1.0, 2.0);
        let phi: f64 = b * FRAC_PI_2 - a * PI - FRAC_PI_4;
        let y0 = phi * phi / (2.0 * b - 4.0 * a);
        assert!((asymptotic_u_large_a(a, b, y0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn direct_arithmetic() {
        let y0 = PI * PI / 8.0;
        let expected = (PI / 2f64.sqrt() - PI + FRAC_PI_4).cos();
        assert!((asymptotic_u_large_a(0.0, 2.0, y0).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn non_positive_radicand_is_rejected() {
        assert!(matches!(
            asymptotic_u_large_a(1.0, 2.0, 0.5),
            Err(SpecFunError::Domain(_))
        ));
        assert!(matches!(
            asymptotic_u_large_a(2.0, 2.0, 0.5),
            Err(SpecFunError::Domain(_))
        ));
    }
}
