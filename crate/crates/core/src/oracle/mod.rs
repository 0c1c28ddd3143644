//! Independent ground truth: adaptive quadrature and exact sums.

mod cubature;
mod gauss_legendre;

pub use cubature::{integrate_box, CompensatedSum, CubatureOptions, CubatureResult, MAX_DIM};
pub use gauss_legendre::{rule as gauss_legendre_rule, Rule};

use crate::error::{invalid, Error, Result};
use crate::local_model::{SquareMatrix, ThirdTensor};
use crate::problems::{separable_exponent, Exponent, Problem};
use num_bigint::{BigInt, Sign};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    /// Truncation half-width; chosen from the Gaussian tail when `None`.
    pub box_halfwidth: Option<f64>,
    pub max_panels: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            box_halfwidth: None,
            max_panels: 400_000,
        }
    }
}

impl QuadratureSpec {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol <= 1e-4) {
            return Err(invalid("rel_tol", format!("must lie in (0, 1e-4], got {}", self.rel_tol)));
        }
        if let Some(l) = self.box_halfwidth {
            if !(l > 0.0 && l.is_finite()) {
                return Err(invalid("box_halfwidth", format!("must be positive, got {l}")));
            }
        }
        if self.max_panels == 0 {
            return Err(invalid("max_panels", "must be positive"));
        }
        Ok(())
    }

    fn options(&self, abs_tol: f64) -> CubatureOptions {
        CubatureOptions {
            rel_tol: self.rel_tol,
            abs_tol,
            initial: 4,
            max_cells: self.max_panels,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleMethod {
    Quadrature,
    ExactSum,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct EmpiricalError {
    pub n: f64,
    pub I_oracle: f64,
    pub leading: f64,
    pub E: f64,
    pub method: OracleMethod,
}

/// Half-width at which `exp(-k L²/2)` has dropped below `rel_tol` with
/// a margin of `e^{-5}` per dimension.
fn gaussian_halfwidth(k: f64, d: usize, rel_tol: f64) -> f64 {
    (2.0 * (-rel_tol.ln() + 5.0 * d as f64) / k).sqrt()
}

/// Integrates `f` over `[-L, L]^d` (clipped to `bbox`), doubling `L`
/// until two successive boxes agree.
fn integrate_truncated<F>(
    f: &F,
    d: usize,
    curvature: f64,
    bbox: Option<(&[f64], &[f64])>,
    spec: &QuadratureSpec,
) -> Result<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    spec.validate()?;
    if d > MAX_DIM {
        return Err(Error::DimensionTooLarge(d));
    }
    let opts = spec.options(0.0);
    let clip = |l: f64| -> (Vec<f64>, Vec<f64>, bool) {
        let mut lo = vec![-l; d];
        let mut hi = vec![l; d];
        let mut clipped = true;
        match bbox {
            Some((blo, bhi)) => {
                for k in 0..d {
                    if blo[k] < lo[k] {
                        clipped = false;
                    }
                    if bhi[k] > hi[k] {
                        clipped = false;
                    }
                    lo[k] = lo[k].max(blo[k]);
                    hi[k] = hi[k].min(bhi[k]);
                }
            }
            None => clipped = false,
        }
        // `clipped`: the box already covers the whole domain
        (lo, hi, clipped)
    };
    if let Some(l) = spec.box_halfwidth {
        let (lo, hi, _) = clip(l);
        return Ok(integrate_box(f, &lo, &hi, opts)?.value);
    }

    let mut l = gaussian_halfwidth(curvature, d, spec.rel_tol);
    let (lo, hi, full) = clip(l);
    let mut prev = integrate_box(f, &lo, &hi, opts)?.value;
    if full {
        return Ok(prev);
    }
    for _ in 0..8 {
        l *= 2.0;
        let (lo, hi, full) = clip(l);
        let next = integrate_box(f, &lo, &hi, opts)?.value;
        if full || (next - prev).abs() <= 10.0 * spec.rel_tol * next.abs() {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::NoConvergence {
        estimate: prev,
        error: f64::NAN,
        cells: 0,
    })
}

/// `(∫ exp(-n(x² + x³ + |x|^{3+γ})) dx)^d`.
pub fn integrate_separable(gamma: f64, d: usize, n: f64, spec: &QuadratureSpec) -> Result<f64> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(invalid("gamma", format!("must lie in (0, 1), got {gamma}")));
    }
    if !(n > 0.0 && n.is_finite()) {
        return Err(invalid("n", format!("must be positive, got {n}")));
    }
    let i1 = integrate_separable_1d(gamma, n, spec)?;
    Ok(i1.powi(d as i32))
}

fn integrate_separable_1d(gamma: f64, n: f64, spec: &QuadratureSpec) -> Result<f64> {
    let f = |x: &[f64]| (-n * separable_exponent(x[0], gamma)).exp();
    integrate_truncated(&f, 1, 2.0 * n, None, spec)
}

fn require_evaluator(problem: &Problem) -> Result<()> {
    if problem.exponent.is_none() {
        return Err(Error::NoOracle(problem.name.clone()));
    }
    if problem.dim() > MAX_DIM {
        return Err(Error::DimensionTooLarge(problem.dim()));
    }
    Ok(())
}

/// `∫_Ω exp(-s·n·f) w`.
pub fn integrate_weighted<W>(problem: &Problem, n: f64, weight: &W, spec: &QuadratureSpec) -> Result<f64>
where
    W: Fn(&[f64]) -> f64 + Sync,
{
    require_evaluator(problem)?;
    if !(n > 0.0 && n.is_finite()) {
        return Err(invalid("n", format!("must be positive, got {n}")));
    }
    let k = problem.exponent_scale() * n;
    let f = |t: &[f64]| {
        let v = problem.f_eval(t);
        if v.is_finite() {
            (-k * v).exp() * weight(t)
        } else {
            0.0
        }
    };
    let curvature = k * problem.local.lambda_min();
    integrate_truncated(&f, problem.dim(), curvature, problem.domain.bounding_box(), spec)
}

/// `I(n) = ∫_Ω exp(-s·n·f)`.
pub fn integrate_nd(problem: &Problem, n: f64, spec: &QuadratureSpec) -> Result<f64> {
    integrate_weighted(problem, n, &|_: &[f64]| 1.0, spec)
}

/// `J(n) = ∫_Ω exp(-s·n·f) g`; falls back to `I(n)` without an amplitude.
pub fn integrate_amplitude(problem: &Problem, n: f64, spec: &QuadratureSpec) -> Result<f64> {
    match &problem.amplitude {
        Some(a) => integrate_weighted(problem, n, &|t: &[f64]| a.kind.eval(t), spec),
        None => integrate_nd(problem, n, spec),
    }
}

/// Natural log of a positive big integer from its bit length and top 128
/// bits. `None` unless `x > 0`.
pub fn ln_bigint(x: &BigInt) -> Option<f64> {
    if x.sign() != Sign::Plus {
        return None;
    }
    let bits = x.bits();
    let shift = bits.saturating_sub(128);
    let top: BigInt = x >> shift;
    let (_, digits) = top.to_u64_digits();
    let mut m = 0.0;
    for &w in digits.iter().rev() {
        m = m * 18_446_744_073_709_551_616.0 + w as f64;
    }
    Some(m.ln() + shift as f64 * std::f64::consts::LN_2)
}

/// Laplace leading term `g0 (2π/(s n))^{d/2} / √det H`.
fn leading_term(problem: &Problem, n: f64) -> f64 {
    let d = problem.dim() as f64;
    let g0 = problem.amplitude.as_ref().map_or(1.0, |a| a.data.g0);
    g0 * (2.0 * PI / (problem.exponent_scale() * n)).powf(d / 2.0) / problem.local.det_hessian().sqrt()
}

/// `E(n)` by the exact sum for integer `n` when the problem has one,
/// otherwise by quadrature.
pub fn empirical_error(problem: &Problem, n: f64) -> Result<EmpiricalError> {
    empirical_error_with(problem, n, &QuadratureSpec::default())
}

/// Largest `n` sent to an exact-sum hook; quadrature takes over above it.
pub const EXACT_MAX_N: u32 = 2000;

pub fn empirical_error_with(problem: &Problem, n: f64, spec: &QuadratureSpec) -> Result<EmpiricalError> {
    if !(n > 0.0 && n.is_finite()) {
        return Err(invalid("n", format!("must be positive, got {n}")));
    }
    let leading = leading_term(problem, n);
    // the Pascal-row sum costs O(n²) big-integer additions
    let integer = n.fract() == 0.0 && n <= EXACT_MAX_N as f64;
    if let (Some(hook), true, None) = (problem.exact, integer, &problem.amplitude) {
        let ln_i = hook.ln_integral(n as u32)?;
        let e = (ln_i - leading.ln()).exp_m1();
        return Ok(EmpiricalError {
            n,
            I_oracle: ln_i.exp(),
            leading,
            E: e,
            method: OracleMethod::ExactSum,
        });
    }
    let value = match (&problem.exponent, &problem.amplitude) {
        // a product of one-dimensional integrals; avoids the kinks of |t_i|^{3+γ}
        (Some(Exponent::SeparableCubic { gamma }), None) => {
            integrate_separable(*gamma, problem.dim(), problem.exponent_scale() * n, spec)?
        }
        _ => integrate_amplitude(problem, n, spec)?,
    };
    Ok(EmpiricalError {
        n,
        I_oracle: value,
        leading,
        E: value / leading - 1.0,
        method: OracleMethod::Quadrature,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OddMoment {
    /// `∫_{B_R} exp(-‖u‖²/2) ‖u‖^β d³f(0, Au) du`.
    pub signed: f64,
    /// Same integral with `|d³f|`.
    pub absolute: f64,
}

impl OddMoment {
    /// `|signed| / absolute`, zero when both vanish.
    pub fn relative(&self) -> f64 {
        if self.absolute == 0.0 {
            self.signed.abs()
        } else {
            self.signed.abs() / self.absolute
        }
    }
}

/// Integrates in polar (d = 2) or spherical (d = 3) coordinates so the
/// ball boundary is a box face. Antipodal nodes then pair up exactly.
pub fn odd_moment_check(t3: &ThirdTensor, a: &SquareMatrix, beta: f64, radius: f64) -> Result<OddMoment> {
    let d = t3.dim();
    if a.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: a.dim(),
        });
    }
    if d > MAX_DIM {
        return Err(Error::DimensionTooLarge(d));
    }
    if !(beta >= 0.0) {
        return Err(invalid("beta", format!("must be nonnegative, got {beta}")));
    }
    if !(radius > 0.0) {
        return Err(invalid("R", format!("must be positive, got {radius}")));
    }
    let cubic = |u: &[f64]| t3.d3f_unchecked(&a.mul_vec(u));
    let radial = |rho: f64| (-0.5 * rho * rho).exp() * rho.powf(beta);
    let point = |x: &[f64]| -> (Vec<f64>, f64) {
        match d {
            1 => (vec![x[0]], 1.0),
            2 => (vec![x[0] * x[1].cos(), x[0] * x[1].sin()], x[0]),
            _ => {
                let (st, ct) = x[2].sin_cos();
                (
                    vec![x[0] * st * x[1].cos(), x[0] * st * x[1].sin(), x[0] * ct],
                    x[0] * x[0] * st,
                )
            }
        }
    };
    let (lo, hi) = match d {
        1 => (vec![-radius], vec![radius]),
        2 => (vec![0.0, 0.0], vec![radius, 2.0 * PI]),
        _ => (vec![0.0, 0.0, 0.0], vec![radius, 2.0 * PI, PI]),
    };
    // |d³f| has kinks along the zero set of the cubic; it only sets the
    // scale, so a loose tolerance is enough
    let opts = CubatureOptions {
        rel_tol: 1e-3,
        abs_tol: 0.0,
        initial: 4,
        max_cells: 200_000,
    };
    let abs_integrand = |x: &[f64]| {
        let (u, jac) = point(x);
        let rho = u.iter().map(|v| v * v).sum::<f64>().sqrt();
        radial(rho) * cubic(&u).abs() * jac
    };
    let absolute = integrate_box(&abs_integrand, &lo, &hi, opts)?.value;
    if absolute == 0.0 {
        return Ok(OddMoment {
            signed: 0.0,
            absolute,
        });
    }
    let signed_integrand = |x: &[f64]| {
        let (u, jac) = point(x);
        let rho = u.iter().map(|v| v * v).sum::<f64>().sqrt();
        radial(rho) * cubic(&u) * jac
    };
    let signed = integrate_box(
        &signed_integrand,
        &lo,
        &hi,
        CubatureOptions {
            rel_tol: 1e-12,
            abs_tol: 1e-12 * absolute,
            ..opts
        },
    )?
    .value;
    Ok(OddMoment { signed, absolute })
}
