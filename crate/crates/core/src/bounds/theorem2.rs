//! Bounds for `J(n) = ∫ exp(-n f) g` with a non-constant amplitude `g`.

use super::theorem1::{moment, xi, TheoremOneConstants};
use super::threshold::last_crossing;
use super::Bracket;
use crate::error::{invalid, Error, Result};
use crate::local_model::LocalExpansion;
use serde::{Deserialize, Serialize};
use std::f64::consts::{E, PI};

/// Local data of the amplitude `g` at the minimizer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GData {
    pub g0: f64,
    pub grad_g0: Vec<f64>,
    /// Amplitude remainder: `|g(t) - g(0) - ∇g(0)·t| ≤ M ‖t‖²` on `B_r`.
    #[serde(rename = "M")]
    pub m: f64,
    pub n3: f64,
    /// Value of, or upper bound on, `∫ exp(-s·n3·f) |g|`.
    #[serde(rename = "Jabs_n3")]
    pub jabs_n3: f64,
    /// `g ≥ 0` on the whole domain. The tail then cannot pull `J` down,
    /// and the lower bound drops its `K_ul` term.
    #[serde(default)]
    pub nonnegative: bool,
}

impl GData {
    pub fn validate(&self, d: usize) -> Result<()> {
        if !(self.g0 != 0.0 && self.g0.is_finite()) {
            return Err(invalid("g0", format!("must be nonzero and finite, got {}", self.g0)));
        }
        if self.grad_g0.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: self.grad_g0.len(),
            });
        }
        if !(self.m >= 0.0 && self.m.is_finite()) {
            return Err(invalid("M", format!("must be nonnegative, got {}", self.m)));
        }
        if !(self.n3 > 0.0) {
            return Err(invalid("n3", format!("must be positive, got {}", self.n3)));
        }
        if !(self.jabs_n3 >= 0.0 && self.jabs_n3.is_finite()) {
            return Err(invalid("Jabs_n3", format!("must be nonnegative, got {}", self.jabs_n3)));
        }
        Ok(())
    }

    pub fn grad_norm(&self) -> f64 {
        self.grad_g0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GConstants {
    #[serde(rename = "K_2")]
    pub k_2: f64,
    #[serde(rename = "K_3")]
    pub k_3: f64,
    #[serde(rename = "K_alpha3")]
    pub k_alpha3: f64,
    #[serde(rename = "K_4")]
    pub k_4: f64,
    #[serde(rename = "K_alpha5")]
    pub k_alpha5: f64,
    #[serde(rename = "K_alpha6")]
    pub k_alpha6: f64,
    #[serde(rename = "K_ul")]
    pub k_ul: f64,
    pub n4: f64,
    pub g0: f64,
    pub nonnegative: bool,
}

/// Constants of the amplitude bound. Uses the same relaxation as `consts`.
pub fn theorem2_constants(
    local: &LocalExpansion,
    gdata: &GData,
    consts: &TheoremOneConstants,
) -> Result<GConstants> {
    let d = local.dim();
    gdata.validate(d)?;
    let lambda = consts.lambda_min;
    let a = consts.alpha;
    let dd = consts.d_const;
    let c = consts.c;
    let m = gdata.m;
    let grad = gdata.grad_norm();
    let g = gdata.g0.abs();

    let k_2 = m * moment(lambda, d, 1.0) / g;
    let k_3 = dd * grad * moment(lambda, d, 2.0) / g;
    let k_alpha3 = c * m * moment(lambda, d, 2.0 + a / 2.0) / g;
    let k_4 = m * dd * dd * moment(lambda, d, 4.0) / g;
    let k_alpha5 = c * c * m * moment(lambda, d, 1.0 + a) / g;
    let k_alpha6 = 2.0 * c * dd * grad * moment(lambda, d, (3.0 + a) / 2.0) / g;
    let big_n3 = local.scale * gdata.n3;
    let k_ul = consts.relaxation.tail_factor() * 7.0 * consts.det_hessian.sqrt()
        / (4.0 * g * (2.0 * PI).powf(d as f64 / 2.0))
        * (big_n3 * xi(local) / 2.0).exp()
        * gdata.jabs_n3;

    let n4 = n4_threshold(local, gdata, consts.n0)?;
    Ok(GConstants {
        k_2,
        k_3,
        k_alpha3,
        k_4,
        k_alpha5,
        k_alpha6,
        k_ul,
        n4,
        g0: gdata.g0,
        nonnegative: gdata.nonnegative,
    })
}

/// Left side minus right side of the amplitude positivity condition at `N`.
pub fn amplitude_residual(local: &LocalExpansion, gdata: &GData, big_n: f64) -> f64 {
    let d = local.dim() as f64;
    let q = d + 2.0 * local.alpha;
    let lambda = local.lambda_min();
    let x = big_n.ln() / big_n;
    gdata.m * q / lambda * x + gdata.grad_norm() * (d * q / lambda).sqrt() * x.sqrt() - gdata.g0
}

/// Smallest `N ≥ n0` from which the amplitude condition holds. Requires
/// `g0 > 0`; negate `g` otherwise (`E(n)` does not change).
pub fn n4_threshold(local: &LocalExpansion, gdata: &GData, n0: f64) -> Result<f64> {
    if !(gdata.g0 > 0.0) {
        return Err(Error::Unreachable(format!(
            "amplitude condition needs g0 > 0, got {}; negate g",
            gdata.g0
        )));
    }
    // log N / N decreases past N = e
    last_crossing(|n| amplitude_residual(local, gdata, n), n0.max(1.0), E)
}

/// Certified bracket on `E(n) = J/J̃ − 1` at the user's `n`; `leading`
/// is `J̃` including `g0`.
pub fn bracket_e_g(n: f64, consts: &TheoremOneConstants, g: &GConstants) -> Bracket {
    let big_n = consts.scale * n;
    let a = consts.alpha;
    let p = |e: f64| big_n.powf(e);
    let tail_lo = if g.nonnegative { 0.0 } else { g.k_ul / p(a) };
    let rel_lo = -consts.k_alpha1 / p(a / 2.0)
        - (g.k_2 + g.k_3) / big_n
        - g.k_alpha3 / p(1.0 + a / 2.0)
        - tail_lo
        - consts.k_l / p(1.0 + a);
    let rel_hi = consts.k_alpha1 / p(a / 2.0)
        + (consts.k_1 + g.k_2 + g.k_3) / big_n
        + (consts.k_alpha2 + g.k_ul) / p(a)
        + g.k_alpha3 / p(1.0 + a / 2.0)
        + g.k_4 / (big_n * big_n)
        + g.k_alpha5 / p(1.0 + a)
        + g.k_alpha6 / p((3.0 + a) / 2.0);
    Bracket::new(n, g.g0 * consts.leading(n), rel_lo, rel_hi, big_n >= g.n4)
}
