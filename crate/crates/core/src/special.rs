//! Log-gamma and the Pochhammer symbol.
//!
//! `ln_gamma` uses the Lanczos approximation with g = 7 and nine
//! coefficients, which is good to roughly 1e-15 relative in Γ on the
//! positive axis. Arguments below 1/2 go through the reflection formula.

use crate::error::{invalid, Result};
use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)] // published coefficients, kept verbatim
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of |Γ(x)|. Defined for every real `x` that is not a
/// non-positive integer.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // Γ(x)Γ(1-x) = π / sin(πx)
        return (PI / (PI * x).sin()).abs().ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut series = LANCZOS_COEF[0];
    for (i, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        series += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + series.ln()
}

/// Γ(x) for x > 0.
pub fn gamma(x: f64) -> f64 {
    ln_gamma(x).exp()
}

/// Pochhammer symbol (x)_a = Γ(x + a) / Γ(x) for x > 0, a ≥ 0.
///
/// Small integer `a` is evaluated as the finite product, which is exact up
/// to rounding; everything else goes through log-gamma.
pub fn pochhammer(x: f64, a: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(invalid("x", format!("Pochhammer base must be positive, got {x}")));
    }
    if !(a >= 0.0) || !a.is_finite() {
        return Err(invalid("a", format!("Pochhammer order must be nonnegative, got {a}")));
    }
    if a == a.trunc() && a <= 64.0 {
        let mut p = 1.0;
        for k in 0..a as u32 {
            p *= x + k as f64;
        }
        return Ok(p);
    }
    Ok((ln_gamma(x + a) - ln_gamma(x)).exp())
}
