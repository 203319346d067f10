use super::gamma::{is_nonpositive_integer, ln_gamma_signed, GAMMA_REL_ERR};
use super::kummer::kummer_m;
use super::{check_finite, EvalMethod, SpecFunError, SpecFunResult};
use crate::quadrature::exp_sinh;

/// Relative accuracy demanded by [`tricomi_u`].
pub const ACCURACY_REL_TOL: f64 = 1e-8;

/// Offset used for integer `b`; the extrapolation also uses `ε/2`.
const LOG_CASE_OFFSET: f64 = 1e-6;

/// Connection-formula results with a worse relative error trigger the
/// integral/recurrence route.
const FALLBACK_REL: f64 = 1e-13;
/// Same for the integer-`b` extrapolation, whose rounding floor is higher.
const FALLBACK_REL_LOG_CASE: f64 = 1e-9;

const LOG_OVERFLOW: f64 = 709.0;

/// Tricomi's `U(a, b; y)` for `y > 0`, with an accuracy gate.
///
/// Fails with [`SpecFunError::Accuracy`] when the error estimate exceeds
/// `1e-8·|U| + 1e-300`. Near zeros of `U` that gate is unreachable by any
/// method; use [`tricomi_u_unchecked`] there and judge the absolute error.
pub fn tricomi_u(a: f64, b: f64, y: f64) -> Result<SpecFunResult, SpecFunError> {
    let r = tricomi_u_unchecked(a, b, y)?;
    if r.abs_error_estimate > ACCURACY_REL_TOL * r.value.abs() + 1e-300 {
        return Err(SpecFunError::Accuracy {
            value: r.value,
            abs_error: r.abs_error_estimate,
        });
    }
    Ok(r)
}

/// Tricomi's `U(a, b; y)` with its error estimate and no accuracy gate.
pub fn tricomi_u_unchecked(a: f64, b: f64, y: f64) -> Result<SpecFunResult, SpecFunError> {
    check_finite(&[("a", a), ("b", b), ("y", y)])?;
    if y <= 0.0 {
        return Err(SpecFunError::Domain(format!("U requires y > 0, got {y}")));
    }
    if a == 0.0 {
        return Ok(SpecFunResult::new(1.0, 0.0, EvalMethod::Series));
    }
    if is_nonpositive_integer(a) {
        return Ok(laguerre_case(-a as u64, b, y));
    }

    let (primary, accept) = if b == b.round() {
        (log_case(a, b, y), FALLBACK_REL_LOG_CASE)
    } else {
        (connection(a, b, y), FALLBACK_REL)
    };
    let primary = match primary {
        Ok(r) if r.abs_error_estimate <= accept * r.value.abs() => return Ok(r),
        other => other,
    };

    let alternate = integral_recurrence(a, b, y);
    match (primary, alternate) {
        (Ok(p), Ok(q)) => Ok(if q.abs_error_estimate < p.abs_error_estimate {
            q
        } else {
            p
        }),
        (Ok(p), Err(_)) => Ok(p),
        (Err(_), Ok(q)) => Ok(q),
        (Err(e), Err(_)) => Err(e),
    }
}

/// `U` from the connection formula alone (the `ε`-offset extrapolation for
/// integer `b`), without the fallback.
pub fn tricomi_u_connection(a: f64, b: f64, y: f64) -> Result<SpecFunResult, SpecFunError> {
    check_finite(&[("a", a), ("b", b), ("y", y)])?;
    if y <= 0.0 {
        return Err(SpecFunError::Domain(format!("U requires y > 0, got {y}")));
    }
    if b == b.round() {
        log_case(a, b, y)
    } else {
        connection(a, b, y)
    }
}

/// `U` from the integral representation at `a + N ∈ [1, 2)`, carried to `a`
/// by the downward recurrence.
pub fn tricomi_u_quadrature(a: f64, b: f64, y: f64) -> Result<SpecFunResult, SpecFunError> {
    check_finite(&[("a", a), ("b", b), ("y", y)])?;
    if y <= 0.0 {
        return Err(SpecFunError::Domain(format!("U requires y > 0, got {y}")));
    }
    integral_recurrence(a, b, y)
}

/// `U(-n, b; y) = (-1)^n Σ_s C(n, s) (b+s)_{n-s} (-y)^s`, valid for every `b`.
fn laguerre_case(n: u64, b: f64, y: f64) -> SpecFunResult {
    let mut sum = 0.0;
    let mut abs_sum = 0.0;
    let mut binom = 1.0;
    let mut ypow = 1.0;
    for s in 0..=n {
        let mut poch = 1.0;
        for j in 0..(n - s) {
            poch *= b + (s + j) as f64;
        }
        let t = binom * poch * ypow;
        sum += t;
        abs_sum += t.abs();
        binom *= (n - s) as f64 / (s + 1) as f64;
        ypow *= -y;
    }
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let err = (n as f64 + 2.0) * f64::EPSILON * abs_sum;
    SpecFunResult::new(sign * sum, err, EvalMethod::Series)
}

fn signed_exp(log_mag: f64, sign: f64) -> Result<f64, SpecFunError> {
    if log_mag > LOG_OVERFLOW {
        return Err(SpecFunError::Overflow { what: "U(a, b; y)" });
    }
    Ok(sign * log_mag.exp())
}

/// `U = Γ(1-b)/Γ(a-b+1)·M(a,b;y) + Γ(b-1)/Γ(a)·y^{1-b}·M(a-b+1,2-b;y)` for
/// non-integer `b`.
fn connection(a: f64, b: f64, y: f64) -> Result<SpecFunResult, SpecFunError> {
    let eps = f64::EPSILON;
    let m1 = kummer_m(a, b, y)?;
    let m2 = kummer_m(a - b + 1.0, 2.0 - b, y)?;

    let (l1b, s1b) = ln_gamma_signed(1.0 - b);
    let (lab, sab) = ln_gamma_signed(a - b + 1.0);
    let (lbm, sbm) = ln_gamma_signed(b - 1.0);
    let (la, sa) = ln_gamma_signed(a);
    let lny = y.ln();

    let mut terms = [0.0_f64; 2];
    let mut coef_abs = [0.0_f64; 2];
    let mut coef_rel = [0.0_f64; 2];

    if !is_nonpositive_integer(a - b + 1.0) {
        let log_c = l1b - lab;
        coef_abs[0] = signed_exp(log_c, 1.0)?;
        coef_rel[0] = 2.0 * GAMMA_REL_ERR + eps * (l1b.abs() + lab.abs());
        terms[0] = if m1.value == 0.0 {
            0.0
        } else {
            signed_exp(log_c + m1.value.abs().ln(), s1b * sab * m1.value.signum())?
        };
    }
    if !is_nonpositive_integer(a) {
        let log_c = lbm - la + (1.0 - b) * lny;
        coef_abs[1] = signed_exp(log_c, 1.0)?;
        coef_rel[1] = 2.0 * GAMMA_REL_ERR + eps * (lbm.abs() + la.abs() + ((1.0 - b) * lny).abs());
        terms[1] = if m2.value == 0.0 {
            0.0
        } else {
            signed_exp(log_c + m2.value.abs().ln(), sbm * sa * m2.value.signum())?
        };
    }

    let value = terms[0] + terms[1];
    let err = coef_abs[0] * m1.abs_error_estimate
        + coef_abs[1] * m2.abs_error_estimate
        + terms[0].abs() * coef_rel[0]
        + terms[1].abs() * coef_rel[1]
        + eps * (terms[0].abs() + terms[1].abs());
    SpecFunResult::new(value, err, EvalMethod::Series).ensure_finite("U(a, b; y)")
}

/// Integer `b`: evaluate at `b+ε` and `b+ε/2` and extrapolate linearly to
/// `ε → 0`.
fn log_case(a: f64, b: f64, y: f64) -> Result<SpecFunResult, SpecFunError> {
    let wide = connection(a, b + LOG_CASE_OFFSET, y)?;
    let narrow = connection(a, b + 0.5 * LOG_CASE_OFFSET, y)?;
    let value = 2.0 * narrow.value - wide.value;
    let delta = (wide.value - narrow.value).abs();
    let err = 2.0 * narrow.abs_error_estimate + wide.abs_error_estimate + delta * LOG_CASE_OFFSET;
    SpecFunResult::new(value, err, EvalMethod::LogCase).ensure_finite("U(a, b; y)")
}

/// `U(a, b; y) = 1/Γ(a) ∫₀^∞ e^{-yt} t^{a-1} (1+t)^{b-a-1} dt`, `a > 0`.
fn integral(a: f64, b: f64, y: f64) -> Result<SpecFunResult, SpecFunError> {
    let (lga, _) = ln_gamma_signed(a);
    let q = exp_sinh(
        |t| (a - 1.0) * t.ln() + (b - a - 1.0) * t.ln_1p() - y * t - lga,
        1e-15,
    );
    let err = q.abs_error + 8.0 * f64::EPSILON * q.value.abs();
    SpecFunResult::new(q.value, err, EvalMethod::Integral).ensure_finite("U(a, b; y)")
}

/// Integral representation at `a + N ∈ [1, 2)` and `a + N + 1`, then the
/// recurrence `U(a-1) = -(b-2a-y)·U(a) - a(a-b+1)·U(a+1)` down to `a`.
///
/// `U` is the minimal solution as `a → +∞`, so the downward direction is
/// stable; the error of the two seeds is propagated exactly through the
/// linear map.
fn integral_recurrence(a: f64, b: f64, y: f64) -> Result<SpecFunResult, SpecFunError> {
    if a > 0.0 {
        return integral(a, b, y);
    }
    let steps = (1.0 - a).ceil() as usize;
    let top = a + steps as f64;
    let u_top = integral(top, b, y)?;
    let u_above = integral(top + 1.0, b, y)?;

    // (value, coefficient of u_top, coefficient of u_above)
    let mut cur = [u_top.value, 1.0, 0.0];
    let mut above = [u_above.value, 0.0, 1.0];
    let mut peak = u_top.value.abs().max(u_above.value.abs());
    let mut index = top;
    for _ in 0..steps {
        let p = b - 2.0 * index - y;
        let q = index * (index - b + 1.0);
        let mut next = [0.0; 3];
        for k in 0..3 {
            next[k] = -p * cur[k] - q * above[k];
        }
        peak = peak.max((p * cur[0]).abs()).max((q * above[0]).abs());
        above = cur;
        cur = next;
        index -= 1.0;
    }
    let value = cur[0];
    let err = cur[1].abs() * u_top.abs_error_estimate
        + cur[2].abs() * u_above.abs_error_estimate
        + 4.0 * (steps as f64) * f64::EPSILON * peak;
    SpecFunResult::new(value, err, EvalMethod::Recurrence).ensure_finite("U(a, b; y)")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn a_zero_is_one() {
        let r = tricomi_u(0.0, 2.5, 1.7).unwrap();
        assert_eq!(r.value, 1.0);
    }

    #[test]
    fn b_equal_a_plus_one_is_power() {
        let r = tricomi_u(1.0, 2.0, 2.0).unwrap();
        assert!((r.value - 0.5).abs() < 1e-12, "{r:?}");
        assert_eq!(r.method_used, EvalMethod::LogCase);
        let r = tricomi_u(2.37, 3.37, 4.2).unwrap();
        assert!(rel(r.value, 4.2f64.powf(-2.37)) < 1e-13);
    }

    #[test]
    fn laguerre_polynomials() {
        // U(-1, b; y) = y - b, U(-2, b; y) = y² - 2(b+1)y + b(b+1)
        assert!((tricomi_u(-1.0, 1.5, 0.3).unwrap().value - (0.3 - 1.5)).abs() < 1e-15);
        let (b, y) = (3.0, 1.25);
        let exact = y * y - 2.0 * (b + 1.0) * y + b * (b + 1.0);
        assert!((tricomi_u(-2.0, b, y).unwrap().value - exact).abs() < 1e-13);
    }

    #[test]
    fn non_positive_y_is_a_domain_error() {
        assert!(matches!(
            tricomi_u(0.5, 1.5, 0.0),
            Err(SpecFunError::Domain(_))
        ));
        assert!(matches!(
            tricomi_u(0.5, 1.5, -2.0),
            Err(SpecFunError::Domain(_))
        ));
        assert!(matches!(
            tricomi_u(f64::NAN, 1.5, 2.0),
            Err(SpecFunError::Domain(_))
        ));
    }

    #[test]
    fn routes_agree_where_both_are_accurate() {
        for &(a, b, y) in &[
            (0.7, 1.3, 0.8),
            (-2.6, 2.4, 1.5),
            (1.9, 4.5, 3.0),
            (-7.3, 1.1, 0.5),
        ] {
            let c = connection(a, b, y).unwrap();
            let r = integral_recurrence(a, b, y).unwrap();
            assert!(
                rel(c.value, r.value) < 1e-11,
                "({a},{b},{y}): {c:?} vs {r:?}"
            );
        }
    }

    #[test]
    fn large_y_falls_back_from_cancelling_connection() {
        // U(a, a+1; y) = y^{-a} with the connection formula perturbed off the
        // identity: b slightly off a+1 keeps both M terms alive.
        let r = tricomi_u(2.3, 3.1, 20.0).unwrap();
        assert_ne!(r.method_used, EvalMethod::Series);
        assert!(r.relative_error() < 1e-12, "{r:?}");
    }

    #[test]
    fn integer_b_matches_integral() {
        for &(a, b, y) in &[(0.5, 1.0, 0.7), (1.5, 2.0, 0.4), (2.25, 3.0, 1.1)] {
            let lc = log_case(a, b, y).unwrap();
            let q = integral(a, b, y).unwrap();
            assert!(rel(lc.value, q.value) < 1e-8, "({a},{b},{y}) {lc:?} {q:?}");
        }
    }
}
