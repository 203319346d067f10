use super::gamma::{is_nonpositive_integer, ln_gamma_signed};
use super::{check_finite, EvalMethod, SpecFunError, SpecFunResult};

const MAX_TERMS: usize = 10_000;
const STOP_RATIO: f64 = 1e-16;
const STOP_RUN: usize = 3;
const ASYMPTOTIC_FROM: f64 = 50.0;

/// Kummer's function `M(a, b; y) = Σ (a)_s/(b)_s · y^s/s!` for `y ≥ 0`.
///
/// The power series is summed until three consecutive terms fall below
/// `1e-16` of the partial sum. Above `y = 50` the large-`y` expansion is also
/// tried and the route with the smaller error estimate wins.
pub fn kummer_m(a: f64, b: f64, y: f64) -> Result<SpecFunResult, SpecFunError> {
    check_finite(&[("a", a), ("b", b), ("y", y)])?;
    if is_nonpositive_integer(b) {
        return Err(SpecFunError::Pole { b });
    }
    if y < 0.0 {
        return Err(SpecFunError::Domain(format!("M requires y >= 0, got {y}")));
    }
    if y == 0.0 || a == 0.0 {
        return Ok(SpecFunResult::new(1.0, 0.0, EvalMethod::Series));
    }

    let series = series(a, b, y);
    if y > ASYMPTOTIC_FROM && !is_nonpositive_integer(a) {
        if let Some(asym) = large_y(a, b, y) {
            if asym.abs_error_estimate < series.abs_error_estimate || !series.value.is_finite() {
                return asym.ensure_finite("M(a, b; y)");
            }
        }
    }
    series.ensure_finite("M(a, b; y)")
}

fn series(a: f64, b: f64, y: f64) -> SpecFunResult {
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    let mut abs_sum = 1.0_f64;
    let mut run = 0;
    let mut converged = false;
    for s in 0..MAX_TERMS {
        let s = s as f64;
        term *= (a + s) / (b + s) * y / (s + 1.0);
        if term == 0.0 {
            // (a)_s hit zero: terminating polynomial
            converged = true;
            break;
        }
        sum += term;
        abs_sum += term.abs();
        if !abs_sum.is_finite() {
            break;
        }
        if (term / sum).abs() < STOP_RATIO {
            run += 1;
            if run >= STOP_RUN {
                converged = true;
                break;
            }
        } else {
            run = 0;
        }
    }
    let truncation = if converged { term.abs() } else { f64::INFINITY };
    let rounding = 2.0 * f64::EPSILON * abs_sum;
    SpecFunResult::new(sum, truncation + rounding, EvalMethod::Series)
}

/// `M ~ Γ(b)/Γ(a) e^y y^{a-b} Σ (b-a)_s (1-a)_s / (s! y^s)`.
///
/// The exponentially recessive companion `Γ(b)/Γ(b-a) y^{-a} (...)` is not
/// added to the value; its leading magnitude is charged to the error.
fn large_y(a: f64, b: f64, y: f64) -> Option<SpecFunResult> {
    let (lgb, sgb) = ln_gamma_signed(b);
    let (lga, sga) = ln_gamma_signed(a);
    let log_pref = lgb - lga + y + (a - b) * y.ln();
    if log_pref > 709.0 {
        return None;
    }
    let pref = sgb * sga * log_pref.exp();

    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    let mut smallest = f64::INFINITY;
    for s in 0..200 {
        let s = s as f64;
        let next = term * (b - a + s) * (1.0 - a + s) / ((s + 1.0) * y);
        if next.abs() >= term.abs() && s > 0.0 {
            smallest = term.abs();
            break;
        }
        term = next;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            smallest = term.abs();
            break;
        }
    }

    let recessive = if is_nonpositive_integer(b - a) {
        0.0
    } else {
        let (lgba, _) = ln_gamma_signed(b - a);
        (lgb - lgba - a * y.ln()).exp()
    };
    let value = pref * sum;
    let err = pref.abs() * smallest + recessive + 4.0 * f64::EPSILON * value.abs();
    Some(SpecFunResult::new(value, err, EvalMethod::Asymptotic))
}
