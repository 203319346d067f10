//! Real gamma function helpers: `Γ`, `1/Γ`, `ln|Γ|` with sign, and `sin(πx)`.
//!
//! Lanczos approximation (g = 7, 9 terms) with reflection for `x < 1/2`.

use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Relative accuracy assumed for the Lanczos evaluation.
pub(crate) const GAMMA_REL_ERR: f64 = 2e-15;

/// True when `x` is `0, -1, -2, ...`.
pub fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

/// `sin(πx)` with exact argument reduction, so integers give exactly zero.
pub fn sin_pi(x: f64) -> f64 {
    if x == x.floor() {
        return 0.0;
    }
    // x mod 2 is exact in floating point
    let mut r = x % 2.0;
    if r < 0.0 {
        r += 2.0;
    }
    let (r, sign) = if r > 1.0 { (r - 1.0, -1.0) } else { (r, 1.0) };
    let r = if r > 0.5 { 1.0 - r } else { r };
    sign * (PI * r).sin()
}

fn lanczos_sum(x: f64) -> f64 {
    // x is the shifted argument (Γ(x + 1) form)
    let mut acc = LANCZOS_COEF[0];
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    acc
}

/// `ln|Γ(x)|` and `sign(Γ(x))`. Poles return `(+∞, 1.0)`.
pub fn ln_gamma_signed(x: f64) -> (f64, f64) {
    if is_nonpositive_integer(x) {
        return (f64::INFINITY, 1.0);
    }
    if x < 0.5 {
        let s = sin_pi(x);
        let (lg, sg) = ln_gamma_signed(1.0 - x);
        return (PI.ln() - s.abs().ln() - lg, s.signum() * sg);
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    let lg = LN_SQRT_2PI + (z + 0.5) * t.ln() - t + lanczos_sum(z).ln();
    (lg, 1.0)
}

/// `Γ(x)`; infinite at the poles.
pub fn gamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        return f64::INFINITY;
    }
    if x < 0.5 {
        return PI / (sin_pi(x) * gamma(1.0 - x));
    }
    if x > 171.7 {
        return f64::INFINITY;
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * lanczos_sum(z)
}

/// `1/Γ(x)`, entire; exactly zero at `0, -1, -2, ...`.
pub fn rgamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        return 0.0;
    }
    let (lg, sg) = ln_gamma_signed(x);
    sg * (-lg).exp()
}
