//! Threshold searches: the smallest `n` from which a condition holds for
//! every larger `n`.

use crate::error::{Error, Result};

const SCAN_POINTS: usize = 4096;

/// Smallest `n ≥ lower` such that `residual(m) ≤ 0` for all `m ≥ n`.
///
/// `residual` must be nonincreasing on `[monotone_from, ∞)`. Below that
/// point the last failure is located on a geometric scan and then refined
/// by bisection. NaN counts as failure.
pub(crate) fn last_crossing(
    residual: impl Fn(f64) -> f64,
    lower: f64,
    monotone_from: f64,
) -> Result<f64> {
    let fails = |n: f64| {
        let r = residual(n);
        r.is_nan() || r > 0.0
    };
    let start = lower.max(monotone_from);

    if fails(start) {
        let mut lo = start;
        let mut hi = start * 2.0;
        while fails(hi) {
            lo = hi;
            hi *= 2.0;
            if !hi.is_finite() || hi > 1e300 {
                return Err(Error::Unreachable(format!(
                    "condition still fails at n = {lo:e}"
                )));
            }
        }
        return Ok(bisect(&fails, lo, hi));
    }

    if start <= lower {
        return Ok(lower);
    }
    let ratio = (start / lower).powf(1.0 / SCAN_POINTS as f64);
    let mut upper = start;
    for k in (0..SCAN_POINTS).rev() {
        let n = if k == 0 { lower } else { lower * ratio.powi(k as i32) };
        if fails(n) {
            return Ok(bisect(&fails, n, upper));
        }
        upper = n;
    }
    Ok(lower)
}

/// `fails(lo)` is true and `fails(hi)` false; returns the crossing from
/// the holding side.
fn bisect(fails: &impl Fn(f64) -> bool, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        if hi - lo <= 1e-12 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if fails(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}
