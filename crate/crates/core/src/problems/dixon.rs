//! Dixon's identity `Σ_k (-1)^k C(2n,k)^3 = (-1)^n (3n)!/(n!)^3` viewed
//! as a Laplace-type integral over angles.

use super::{Domain, ExactHook, Exponent, HalfSpace, Problem};
use crate::bounds::{theorem1_constants, RelaxationParams, TheoremOneConstants};
use crate::error::{invalid, Error, Result};
use crate::local_model::{LocalExpansion, SymMatrix, ThirdTensor};
use num_bigint::{BigInt, BigUint};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_6, PI};

/// `r = π/√108`, the radius used by McClure and Wong.
pub const DIXON2_DEFAULT_R: f64 = 0.302_299_894_039_036_3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DixonSpec {
    pub d: usize,
    /// Ball size: `r = δ = η √d α̂`.
    pub eta: f64,
}

/// Minimizer coordinate `α̂ = π / (2(d+1))`.
pub(crate) fn alpha_hat(d: usize) -> f64 {
    PI / (2.0 * (d as f64 + 1.0))
}

/// `(1 + 2 sin² x) / cos⁴ x`, the bound on the fourth derivative of
/// `-log cos` (up to the factor 2).
fn quartic_bound(x: f64) -> f64 {
    let c = x.cos();
    (1.0 + 2.0 * x.sin().powi(2)) / c.powi(4)
}

fn dixon_d_constant(d: usize) -> f64 {
    let a = alpha_hat(d);
    (d as f64).powf(1.5) / 6.0 * 2.0 * a.sin() / a.cos().powi(3)
}

/// Hölder constant of the `d`-dimensional Dixon exponent on `B_{η√d α̂}`.
pub fn dixon_c(d: usize, eta: f64) -> f64 {
    let a = alpha_hat(d);
    let df = d as f64;
    df * df / 12.0 * (quartic_bound((eta * df + 1.0) * a) + quartic_bound((eta * df.sqrt() + 1.0) * a))
}

/// `Δ(η) = λ_min r²/2 - D r³ - C r⁴` with `r = η√d α̂`.
pub fn dixon_delta(d: usize, eta: f64) -> f64 {
    let a = alpha_hat(d);
    let r = eta * (d as f64).sqrt() * a;
    let lambda = 1.0 / a.cos().powi(2);
    0.5 * lambda * r * r - dixon_d_constant(d) * r.powi(3) - dixon_c(d, eta) * r.powi(4)
}

/// Largest `η ∈ (0, 1)` with `Δ(η) > 0`.
pub fn dixon_max_eta(d: usize) -> f64 {
    let steps = 2000;
    let mut last_good = 0.0;
    let mut first_bad = 1.0;
    for i in 1..steps {
        let eta = i as f64 / steps as f64;
        if dixon_delta(d, eta) > 0.0 {
            last_good = eta;
        } else {
            first_bad = eta;
            break;
        }
    }
    let (mut lo, mut hi) = (last_good, first_bad);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if dixon_delta(d, mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// `log cos(a + p) - log cos a`, accurate for small `p`.
fn log_cos_ratio(a: f64, p: f64) -> f64 {
    let h = (0.5 * p).sin();
    (-2.0 * h * h - a.tan() * p.sin()).ln_1p()
}

/// Shifted Dixon exponent
/// `-log|cos(Σφ - α̂)| - Σ log cos(φ_i + α̂) + (d+1) log cos α̂`,
/// written as a sum of log-ratios so that it keeps full relative accuracy
/// near the minimizer. The domain test is left to the caller.
pub(crate) fn dixon_f(d: usize, phi: &[f64]) -> f64 {
    let a = alpha_hat(d);
    let mut total = 0.0;
    let mut sum = 0.0;
    for &p in phi {
        if (p + a).cos() <= 0.0 {
            return f64::INFINITY;
        }
        total -= log_cos_ratio(a, p);
        sum += p;
    }
    let c = (sum - a).cos();
    if c > 0.0 {
        // cos(S - a) / cos a = cos(-a + S) / cos(-a)
        total - log_cos_ratio(-a, sum)
    } else if c < 0.0 {
        // only reachable far from the minimizer, for d ≥ 3
        total - (-c / a.cos()).ln()
    } else {
        f64::INFINITY
    }
}

pub fn dixon_exponent(spec: DixonSpec) -> Result<Problem> {
    let DixonSpec { d, eta } = spec;
    if d < 2 {
        return Err(invalid("d", format!("Dixon problems need d ≥ 2, got {d}")));
    }
    if !(eta > 0.0 && eta < 1.0) {
        return Err(invalid("eta", format!("must lie in (0, 1), got {eta}")));
    }
    let delta = dixon_delta(d, eta);
    if !(delta > 0.0) {
        return Err(Error::DeltaNonpositive {
            eta,
            delta,
            max_eta: dixon_max_eta(d),
        });
    }
    let a = alpha_hat(d);
    let (sin, cos) = a.sin_cos();
    let hessian = SymMatrix::from_fn(d, |i, j| if i == j { 2.0 } else { 1.0 } / (cos * cos));
    let third = ThirdTensor::from_fn(d, |i, j, k| {
        if i == j && j == k {
            0.0
        } else {
            -2.0 * sin / cos.powi(3)
        }
    });
    let r = eta * (d as f64).sqrt() * a;
    let df = d as f64;
    let i_n1 = (2f64.powi(d as i32) - 1.0) * (PI / 4.0).powf(df) / (4.0 * cos.powf(2.0 * (df + 1.0)));
    let local = LocalExpansion::new(hessian, third, dixon_c(d, eta), 2.0, r, r, delta, 1.0, i_n1)?
        .with_scale(2.0)?;

    let mut halfspaces = Vec::with_capacity(2 * d + 1);
    for i in 0..d {
        let mut e = vec![0.0; d];
        e[i] = 1.0;
        halfspaces.push(HalfSpace {
            normal: e.clone(),
            offset: df * a,
        });
        e[i] = -1.0;
        halfspaces.push(HalfSpace {
            normal: e,
            offset: FRAC_PI_2 + a,
        });
    }
    halfspaces.push(HalfSpace {
        normal: vec![-1.0; d],
        offset: df * a,
    });
    Ok(Problem {
        name: format!("dixon:d={d},eta={eta}"),
        local,
        exponent: Some(Exponent::Dixon { d }),
        domain: Domain::Polyhedron {
            halfspaces,
            bbox_lo: vec![-FRAC_PI_2 - a; d],
            bbox_hi: vec![df * a; d],
        },
        amplitude: None,
        exact: Some(ExactHook::DixonSum { d }),
    })
}

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Gradients of the three angle arguments of the transformed problem.
const DIXON2_ARGS: [[f64; 2]; 3] = [[SQRT3 / 2.0, -0.5], [-SQRT3 / 2.0, -0.5], [0.0, 1.0]];

pub(crate) fn dixon2_f(t: &[f64]) -> f64 {
    let mut total = 0.0;
    for g in &DIXON2_ARGS {
        let a = g[0] * t[0] + g[1] * t[1];
        if (a + FRAC_PI_6).cos() <= 0.0 {
            return f64::INFINITY;
        }
        total -= log_cos_ratio(FRAC_PI_6, a);
    }
    total
}

/// The d = 2 Dixon exponent in coordinates where its Hessian is `2I`,
/// with the Hölder bound on the ball of radius `r`.
pub fn dixon2_transformed(r: f64) -> Result<Problem> {
    if !(r > 0.0 && r < PI / 3.0) {
        return Err(invalid("r", format!("must lie in (0, π/3), got {r}")));
    }
    // third derivative of -log cos at π/6
    let kappa = 8.0 / (3.0 * SQRT3);
    let third = ThirdTensor::from_fn(2, |i, j, k| {
        kappa * DIXON2_ARGS.iter().map(|g| g[i] * g[j] * g[k]).sum::<f64>()
    });
    let hessian = SymMatrix::diag(&[2.0, 2.0]);
    let c = 3.0 / 32.0 * quartic_bound(r + FRAC_PI_6);
    let d_const = third.d_constant();
    let delta = r * r - d_const * r.powi(3) - c * r.powi(4);
    if !(delta > 0.0) {
        return Err(invalid("r", format!("Delta = {delta:e} is not positive")));
    }
    let i_n1 = 6.0 * PI * PI / 3f64.powf(3.5);
    let local = LocalExpansion::new(hessian, third, c, 2.0, r, r, delta, 1.0, i_n1)?.with_scale(2.0)?;
    let halfspaces = DIXON2_ARGS
        .iter()
        .map(|g| HalfSpace {
            normal: g.to_vec(),
            offset: PI / 3.0,
        })
        .collect();
    Ok(Problem {
        name: format!("dixon2:r={r}"),
        local,
        exponent: Some(Exponent::Dixon2Transformed),
        domain: Domain::Polyhedron {
            halfspaces,
            bbox_lo: vec![-PI / SQRT3, -2.0 * PI / 3.0],
            bbox_hi: vec![PI / SQRT3, PI / 3.0],
        },
        amplitude: None,
        exact: Some(ExactHook::Dixon2Sum),
    })
}

/// `S(s, n) = Σ_{k=0}^{2n} (-1)^{k+n} C(2n, k)^s`, exactly.
pub fn dixon_sum_exact(s: u32, n: u32) -> BigInt {
    let row = binomial_row(2 * n as usize);
    let mut total = BigInt::from(0);
    for (k, c) in row.iter().enumerate() {
        let term = BigInt::from(c.pow(s));
        if (k + n as usize).is_multiple_of(2) {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

/// Row `m` of Pascal's triangle by repeated addition.
fn binomial_row(m: usize) -> Vec<BigUint> {
    let mut row = vec![BigUint::from(1u32)];
    for _ in 0..m {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(BigUint::from(1u32));
        for w in row.windows(2) {
            next.push(&w[0] + &w[1]);
        }
        next.push(BigUint::from(1u32));
        row = next;
    }
    row
}

/// Log of the Laplace leading term for `S(d+1, n)`.
pub fn dixon_leading(d: usize, n: u32) -> f64 {
    let a = alpha_hat(d);
    let df = d as f64;
    let nf = n as f64;
    let m = 2.0 * nf * (df + 1.0);
    let ln_det = (df + 1.0).ln() - 2.0 * df * a.cos().ln();
    std::f64::consts::LN_2 + m * (2.0 * a.cos()).ln() - df * PI.ln() + 0.5 * df * (PI / nf).ln()
        - 0.5 * ln_det
}

/// Closed form `sin²(α̂) d⁴ (d+2)(d+4)` printed for `K₁` of the Dixon
/// exponent. Differs from the general formula by a factor of 9.
pub fn dixon_k1_closed_form(d: usize) -> f64 {
    let df = d as f64;
    alpha_hat(d).sin().powi(2) * df.powi(4) * (df + 2.0) * (df + 4.0)
}

/// Published constants for the transformed d = 2 problem, in the
/// theorem's variable `N = 2n`:
/// `K_{α,1}/2 = 0.9238`, `(K_{α,1}+K₁)/2 = 1.072`, `K_l/8 = 0.1355`,
/// `K_{α,2} = 20.48`, `(K_{α,2}+K_u)/4 = 5.439`, `n₀ = 1479`.
pub fn dixon2_published_constants() -> TheoremOneConstants {
    let problem = dixon2_transformed(DIXON2_DEFAULT_R).expect("default radius is feasible");
    let mut c = theorem1_constants(&problem.local, RelaxationParams::base())
        .expect("default problem has finite thresholds");
    c.k_alpha1 = 2.0 * 0.9238;
    c.k_1 = 2.0 * 1.072 - c.k_alpha1;
    c.k_l = 8.0 * 0.1355;
    c.k_alpha2 = 20.48;
    c.k_u = 4.0 * 5.439 - c.k_alpha2;
    c.n0 = 1479.0;
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_radius() {
        assert!((DIXON2_DEFAULT_R - PI / 108f64.sqrt()).abs() < 1e-17);
    }

    #[test]
    fn small_sums() {
        assert_eq!(dixon_sum_exact(3, 1), BigInt::from(6));
        // (3n)!/(n!)^3 at n = 2 and 3
        assert_eq!(dixon_sum_exact(3, 2), BigInt::from(90));
        assert_eq!(dixon_sum_exact(3, 3), BigInt::from(1680));
        for n in 1..20 {
            assert_eq!(dixon_sum_exact(1, n), BigInt::from(0));
        }
        // Σ (-1)^{k+n} C(2n,k)² = C(2n, n)
        assert_eq!(dixon_sum_exact(2, 5), BigInt::from(252));
    }

    #[test]
    fn sum_matches_factorial_form() {
        for n in 1..=30u32 {
            let mut f = BigUint::from(1u32);
            for k in 1..=3 * n {
                f *= k;
            }
            let mut g = BigUint::from(1u32);
            for k in 1..=n {
                g *= k;
            }
            let want = BigInt::from(f / g.pow(3));
            assert_eq!(dixon_sum_exact(3, n), want, "n = {n}");
        }
    }

    #[test]
    fn dixon_local_data_d2() {
        let p = dixon_exponent(DixonSpec { d: 2, eta: 1.0 / 3.0 }).unwrap();
        assert!((alpha_hat(2) - FRAC_PI_6).abs() < 1e-15);
        assert!((p.local.lambda_min() - 4.0 / 3.0).abs() < 1e-12);
        assert!((p.local.det_hessian() - 16.0 / 3.0).abs() < 1e-12);
        assert!((p.local.i_n1 - PI * PI / 9.0).abs() < 1e-12);
        assert_eq!(p.exponent_scale(), 2.0);
    }

    #[test]
    fn dixon_c_at_one_third() {
        // evaluating the printed formula; the published 7.7 is not reproduced
        assert!((dixon_c(2, 1.0 / 3.0) - 6.7205).abs() < 1e-3, "{}", dixon_c(2, 1.0 / 3.0));
        assert!((dixon_c(2, 0.36) - 7.721).abs() < 1e-3);
    }

    #[test]
    fn max_eta_brackets_sign_change() {
        for d in 2..=5 {
            let e = dixon_max_eta(d);
            assert!(dixon_delta(d, e) > 0.0);
            assert!(dixon_delta(d, e + 1e-9) <= 0.0);
        }
        assert!((dixon_max_eta(2) - 0.348).abs() < 2e-3);
    }

    #[test]
    fn infeasible_eta_reports_limit() {
        match dixon_exponent(DixonSpec { d: 2, eta: 0.5 }) {
            Err(Error::DeltaNonpositive { max_eta, .. }) => assert!((max_eta - dixon_max_eta(2)).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn dixon2_local_data() {
        let p = dixon2_transformed(DIXON2_DEFAULT_R).unwrap();
        let l = &p.local;
        assert!((l.c - 0.923786).abs() < 1e-6);
        assert!((l.big_delta - 0.068633).abs() < 1e-6);
        assert!((l.d_constant() - 2.0 * 6f64.sqrt() / 9.0).abs() < 1e-14);
        assert!((l.third.get(1, 1, 1) - 2.0 * SQRT3 / 3.0).abs() < 1e-14);
        assert!((l.third.get(0, 0, 1) + 2.0 * SQRT3 / 3.0).abs() < 1e-14);
        assert!(l.third.get(0, 0, 0).abs() < 1e-15);
        assert!(l.third.get(0, 1, 1).abs() < 1e-15);
        // cubic model x² + y² + (√3/9)(y³ - 3x²y)
        let (x, y) = (0.3, -0.2);
        let want = x * x + y * y + SQRT3 / 9.0 * (y * y * y - 3.0 * x * x * y);
        assert!((l.cubic_model(&[x, y]) - want).abs() < 1e-15);
        assert!(dixon2_transformed(0.0).is_err());
        assert!(dixon2_transformed(PI / 3.0).is_err());
    }

    #[test]
    fn leading_general_matches_d2_closed_form() {
        for n in 1..=20 {
            let nf = n as f64;
            let want = (3.0 * nf + 0.5) * 3f64.ln() - (2.0 * PI * nf).ln();
            assert!((dixon_leading(2, n) - want).abs() < 1e-10, "n = {n}");
        }
    }

    #[test]
    fn k1_closed_form_d2() {
        // sin²(π/6)·16·4·6
        assert!((dixon_k1_closed_form(2) - 96.0).abs() < 1e-12);
    }

    #[test]
    fn published_constants_round_trip() {
        let c = dixon2_published_constants();
        let p = c.per_n();
        assert!((p.k_alpha1 - 0.9238).abs() < 1e-12);
        assert!((p.k_alpha1 + p.k_1 - 1.072).abs() < 1e-12);
        assert!((p.k_l - 0.1355).abs() < 1e-12);
        assert!((p.k_alpha2 + p.k_u - 5.439).abs() < 1e-12);
    }
}
