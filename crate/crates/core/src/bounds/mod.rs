//! Error constants, validity thresholds and certified brackets.

mod relax;
mod theorem1;
mod theorem2;
mod threshold;

pub use relax::{solve_xa, RelaxationParams, BASE_THRESHOLD};
pub use theorem1::{
    bracket_i, cubic_remainder_lhs, integrability_residual, k_lower, n0_threshold,
    theorem1_constants, thresholds, xi, Binding, PerNCoefficients, TheoremOneConstants,
    Thresholds,
};
pub use theorem2::{
    amplitude_residual, bracket_e_g, n4_threshold, theorem2_constants, GConstants, GData,
};

use serde::{Deserialize, Serialize};

/// Enclosure of an integral (`abs_*`) and of its relative Laplace error
/// (`rel_*`) at one value of `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bracket {
    pub n: f64,
    pub leading: f64,
    pub rel_lo: f64,
    pub rel_hi: f64,
    pub abs_lo: f64,
    pub abs_hi: f64,
    /// `n` is at or past the threshold that certifies the bracket.
    pub valid: bool,
}

impl Bracket {
    pub fn new(n: f64, leading: f64, rel_lo: f64, rel_hi: f64, valid: bool) -> Self {
        let a = leading * (1.0 + rel_lo);
        let b = leading * (1.0 + rel_hi);
        Self {
            n,
            leading,
            rel_lo,
            rel_hi,
            abs_lo: a.min(b),
            abs_hi: a.max(b),
            valid,
        }
    }

    pub fn radius(&self) -> f64 {
        self.rel_lo.abs().max(self.rel_hi.abs())
    }

    pub fn contains(&self, value: f64) -> bool {
        self.abs_lo <= value && value <= self.abs_hi
    }

    pub fn contains_relative(&self, e: f64) -> bool {
        self.rel_lo <= e && e <= self.rel_hi
    }
}

/// McClure–Wong radius for the d = 2 Dixon sum:
/// `1.8245/n + (7/3) exp(-n π²/72)`.
pub fn mcw_reference(n: f64) -> f64 {
    1.8245 / n + 7.0 / 3.0 * (-n * std::f64::consts::PI.powi(2) / 72.0).exp()
}
