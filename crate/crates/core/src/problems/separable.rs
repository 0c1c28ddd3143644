//! `f(t) = Σ t_i² + t_i³ + |t_i|^{3+γ}`: separable, so its integral is a
//! power of a one-dimensional one.

use super::{Domain, Exponent, Problem};
use crate::error::{invalid, Result};
use crate::local_model::{LocalExpansion, SymMatrix, ThirdTensor};
use crate::oracle::{integrate_separable, QuadratureSpec};

pub fn separable_exponent(x: f64, gamma: f64) -> f64 {
    x * x + x * x * x + x.abs().powf(3.0 + gamma)
}

/// `Δ(r) = r² - D r³ - r^{2+α}` with `λ_min = 2`, `C = 1`, `D = d^{3/2}`.
/// Valid as an exterior gap because `f` grows along every ray.
fn separable_delta(d: usize, alpha: f64, r: f64) -> f64 {
    r * r - (d as f64).powf(1.5) * r.powi(3) - r.powf(2.0 + alpha)
}

/// The radius maximizing `Δ`, root of `2 - 3Dr - (2+α) r^α`.
fn best_radius(d: usize, alpha: f64) -> f64 {
    let dc = (d as f64).powf(1.5);
    let g = |r: f64| 2.0 - 3.0 * dc * r - (2.0 + alpha) * r.powf(alpha);
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Separable cubic with `r` chosen to maximize the exterior gap `Δ`.
pub fn separable_cubic(d: usize, gamma: f64) -> Result<Problem> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(invalid("gamma", format!("must lie in (0, 1), got {gamma}")));
    }
    separable_cubic_with_r(d, gamma, best_radius(d, 1.0 + gamma))
}

pub fn separable_cubic_with_r(d: usize, gamma: f64, r: f64) -> Result<Problem> {
    if d < 2 {
        return Err(invalid("d", format!("must be at least 2, got {d}")));
    }
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(invalid("gamma", format!("must lie in (0, 1), got {gamma}")));
    }
    let alpha = 1.0 + gamma;
    let delta = separable_delta(d, alpha, r);
    if !(r > 0.0 && delta > 0.0) {
        return Err(invalid("r", format!("Delta = {delta:e} is not positive at r = {r}")));
    }
    let i_n1 = integrate_separable(gamma, d, 1.0, &QuadratureSpec::default())?;
    let third = ThirdTensor::from_fn(d, |i, j, k| if i == j && j == k { 6.0 } else { 0.0 });
    let local = LocalExpansion::new(SymMatrix::diag(&vec![2.0; d]), third, 1.0, alpha, r, r, delta, 1.0, i_n1)?;
    Ok(Problem {
        name: format!("separable-cubic:d={d},gamma={gamma}"),
        local,
        exponent: Some(Exponent::SeparableCubic { gamma }),
        domain: Domain::Whole,
        amplitude: None,
        exact: None,
    })
}
