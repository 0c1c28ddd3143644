//! Bounds for the fully exponential integral `I(n) = ∫ exp(-n f)`.
//!
//! All constants and thresholds here are expressed in the exponent
//! multiplier `N` of `f` itself. For a local expansion with `scale = s`
//! the user's `n` maps to `N = s·n`; [`bracket_i`] takes the user's `n`
//! and performs that mapping.

use super::relax::RelaxationParams;
use super::threshold::last_crossing;
use super::Bracket;
use crate::error::{Error, Result};
use crate::local_model::LocalExpansion;
use crate::special::pochhammer;
use serde::{Deserialize, Serialize};
use std::f64::consts::{E, PI};

/// Which requirement fixes `n0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Binding {
    /// `max(1, N1)`: neither condition is active.
    LowerLimit,
    /// `d ≤ (d+2α) log N ≤ ξ N`.
    Integrability,
    /// The cubic-plus-remainder condition with cut-off `x_a`.
    CubicRemainder,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// Smallest certified `N`.
    pub n0: f64,
    /// Where the integrability condition alone starts to hold.
    pub n2: f64,
    /// Where the cubic-remainder condition alone starts to hold.
    pub n_cubic: f64,
    pub binding: Binding,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremOneConstants {
    pub d: usize,
    pub alpha: f64,
    pub lambda_min: f64,
    pub det_hessian: f64,
    #[serde(rename = "D")]
    pub d_const: f64,
    #[serde(rename = "C")]
    pub c: f64,
    pub xi: f64,
    #[serde(rename = "K_alpha1")]
    pub k_alpha1: f64,
    #[serde(rename = "K_alpha2")]
    pub k_alpha2: f64,
    #[serde(rename = "K_1")]
    pub k_1: f64,
    #[serde(rename = "K_l")]
    pub k_l: f64,
    #[serde(rename = "K_u")]
    pub k_u: f64,
    pub n0: f64,
    pub n2: f64,
    pub binding: Binding,
    pub scale: f64,
    pub relaxation: RelaxationParams,
}

/// The same constants divided by the powers of `s` they multiply, so the
/// bracket reads `1 ± coef / n^p` in the user's `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerNCoefficients {
    #[serde(rename = "K_alpha1")]
    pub k_alpha1: f64,
    #[serde(rename = "K_1")]
    pub k_1: f64,
    #[serde(rename = "K_alpha2")]
    pub k_alpha2: f64,
    #[serde(rename = "K_u")]
    pub k_u: f64,
    #[serde(rename = "K_l")]
    pub k_l: f64,
    pub n0: f64,
    pub n2: f64,
}

impl TheoremOneConstants {
    pub fn per_n(&self) -> PerNCoefficients {
        let s = self.scale;
        let a = self.alpha;
        PerNCoefficients {
            k_alpha1: self.k_alpha1 / s.powf(a / 2.0),
            k_1: self.k_1 / s,
            k_alpha2: self.k_alpha2 / s.powf(a),
            k_u: self.k_u / s.powf(a),
            k_l: self.k_l / s.powf(1.0 + a),
            n0: self.n0 / s,
            n2: self.n2 / s,
        }
    }

    /// Laplace leading term `(2π/N)^{d/2} / √det` at `N = scale·n`.
    pub fn leading(&self, n: f64) -> f64 {
        let big_n = self.scale * n;
        (2.0 * PI / big_n).powf(self.d as f64 / 2.0) / self.det_hessian.sqrt()
    }

    /// Relative lower and upper bounds on `E` at `N` (already scaled).
    pub fn relative_bounds(&self, big_n: f64) -> (f64, f64) {
        let a = self.alpha;
        let lo = -self.k_alpha1 / big_n.powf(a / 2.0) - self.k_l / big_n.powf(1.0 + a);
        let hi = self.k_alpha1 / big_n.powf(a / 2.0)
            + self.k_1 / big_n
            + (self.k_alpha2 + self.k_u) / big_n.powf(a);
        (lo, hi)
    }
}

/// `ξ = min(r² λ_min, 2Δ)`.
pub fn xi(local: &LocalExpansion) -> f64 {
    (local.r * local.r * local.lambda_min()).min(2.0 * local.big_delta)
}

/// `K_l = (e/2) √(d/π) (1 + 2α/d)^{d/2 - 1}`.
pub fn k_lower(d: usize, alpha: f64) -> f64 {
    let d = d as f64;
    E / 2.0 * (d / PI).sqrt() * (1.0 + 2.0 * alpha / d).powf(d / 2.0 - 1.0)
}

/// Gaussian moment factor `(2/λ)^p (d/2)_p`.
pub(crate) fn moment(lambda: f64, d: usize, p: f64) -> f64 {
    (2.0 / lambda).powf(p) * pochhammer(d as f64 / 2.0, p).expect("d/2 > 0 and p ≥ 0")
}

pub fn theorem1_constants(
    local: &LocalExpansion,
    relax: RelaxationParams,
) -> Result<TheoremOneConstants> {
    local.validate()?;
    let d = local.dim();
    let alpha = local.alpha;
    let lambda = local.lambda_min();
    let det = local.hessian.determinant()?;
    let d_const = local.d_constant();
    let c = local.c;
    let xi = xi(local);

    let k_alpha1 = c * moment(lambda, d, 1.0 + alpha / 2.0);
    let k_alpha2 = relax.quadratic_factor() * c * c * moment(lambda, d, 2.0 + alpha);
    let k_1 = relax.quadratic_factor() * d_const * d_const * moment(lambda, d, 3.0);
    let k_l = k_lower(d, alpha);
    let big_n1 = local.scale * local.n1;
    let k_u = relax.tail_factor() * 7.0 * det.sqrt() / (4.0 * (2.0 * PI).powf(d as f64 / 2.0))
        * local.i_n1
        * (xi * big_n1 / 2.0).exp();

    let th = thresholds(local, relax)?;
    Ok(TheoremOneConstants {
        d,
        alpha,
        lambda_min: lambda,
        det_hessian: det,
        d_const,
        c,
        xi,
        k_alpha1,
        k_alpha2,
        k_1,
        k_l,
        k_u,
        n0: th.n0,
        n2: th.n2,
        binding: th.binding,
        scale: local.scale,
        relaxation: relax,
    })
}

/// Left side of the cubic-remainder condition at `N`.
pub fn cubic_remainder_lhs(local: &LocalExpansion, big_n: f64) -> f64 {
    let d = local.dim() as f64;
    let a = local.alpha;
    let lambda = local.lambda_min();
    let q = (d + 2.0 * a) / lambda;
    let ln = big_n.ln();
    local.d_constant() * q.powf(1.5) * ln.powf(1.5) / big_n.sqrt()
        + local.c * q.powf(1.0 + a / 2.0) * ln.powf(1.0 + a / 2.0) / big_n.powf(a / 2.0)
}

/// Residual of `d ≤ (d+2α) log N ≤ ξ N` (≤ 0 means it holds).
pub fn integrability_residual(local: &LocalExpansion, big_n: f64) -> f64 {
    let d = local.dim() as f64;
    let w = (d + 2.0 * local.alpha) * big_n.ln();
    (d - w).max(w - xi(local) * big_n)
}

pub fn thresholds(local: &LocalExpansion, relax: RelaxationParams) -> Result<Thresholds> {
    let xi = xi(local);
    if !(xi > 0.0) {
        return Err(Error::Unreachable(format!("xi = {xi} is not positive")));
    }
    let d = local.dim() as f64;
    let a = local.alpha;
    let lower = (local.scale * local.n1).max(1.0);

    // (d+2α) ln N − ξN decreases once N > (d+2α)/ξ
    let n2 = last_crossing(
        |n| integrability_residual(local, n),
        lower,
        (d + 2.0 * a) / xi,
    )?;
    // each log^p N / N^q term peaks at N = e^{p/q}
    let mono = (3.0_f64).exp().max(((2.0 + a) / a).exp());
    let n_cubic = last_crossing(|n| cubic_remainder_lhs(local, n) - relax.x_a, lower, mono)?;

    let n0 = n2.max(n_cubic);
    let binding = if n0 <= lower {
        Binding::LowerLimit
    } else if n_cubic > n2 {
        Binding::CubicRemainder
    } else {
        Binding::Integrability
    };
    Ok(Thresholds {
        n0,
        n2,
        n_cubic,
        binding,
    })
}

/// `n0` alone, in the exponent multiplier `N`.
pub fn n0_threshold(local: &LocalExpansion, relax: RelaxationParams) -> Result<f64> {
    Ok(thresholds(local, relax)?.n0)
}

/// Certified bracket on `I(n) = ∫ exp(-s·n·f)` at the user's `n`.
///
/// Brackets below the threshold are still returned, flagged `valid = false`.
pub fn bracket_i(n: f64, consts: &TheoremOneConstants) -> Bracket {
    let big_n = consts.scale * n;
    let (rel_lo, rel_hi) = consts.relative_bounds(big_n);
    Bracket::new(n, consts.leading(n), rel_lo, rel_hi, big_n >= consts.n0)
}
