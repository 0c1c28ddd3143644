use crate::error::{invalid, Result};
use serde::{Deserialize, Serialize};

/// Which quadratic majorant `e^x ≤ 1 + x + (1+a)x²` (valid for `x ≤ x_a`)
/// the upper bound is built on.
///
/// The unrelaxed bound uses `a = 0` with the conventional cut-off
/// `x_a = 7/4`, slightly below the exact root 1.7933.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelaxationParams {
    pub a: f64,
    pub x_a: f64,
}

pub const BASE_THRESHOLD: f64 = 1.75;

impl RelaxationParams {
    pub fn base() -> Self {
        Self {
            a: 0.0,
            x_a: BASE_THRESHOLD,
        }
    }

    /// Relaxation with slack `a > -1/2`; `x_a` is the exact crossing.
    pub fn new(a: f64) -> Result<Self> {
        Ok(Self { a, x_a: solve_xa(a)? })
    }

    pub fn is_base(&self) -> bool {
        self.a == 0.0 && self.x_a == BASE_THRESHOLD
    }

    /// Multiplier on `K_1` and `K_{α,2}`.
    pub fn quadratic_factor(&self) -> f64 {
        1.0 + self.a
    }

    /// Multiplier on the tail constant `K_u` (and `K_ul`).
    pub fn tail_factor(&self) -> f64 {
        self.x_a / BASE_THRESHOLD
    }
}

impl Default for RelaxationParams {
    fn default() -> Self {
        Self::base()
    }
}

fn majorant_gap(x: f64, a: f64) -> f64 {
    x.exp_m1() - x - (1.0 + a) * x * x
}

/// Positive root of `e^x = 1 + x + (1+a)x²`. Below it the inequality
/// `e^x ≤ 1 + x + (1+a)x²` holds; just above it fails.
pub fn solve_xa(a: f64) -> Result<f64> {
    if !(a > -0.5) || !a.is_finite() {
        return Err(invalid("a", format!("relaxation slack must exceed -1/2, got {a}")));
    }
    // The gap is negative on (0, root) and positive after it.
    let mut hi = 1.0;
    while majorant_gap(hi, a) <= 0.0 {
        hi *= 2.0;
        if hi > 1e3 {
            return Err(invalid("a", "no crossing below x = 1000"));
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if majorant_gap(mid, a) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 * hi {
            break;
        }
    }
    Ok(lo)
}
