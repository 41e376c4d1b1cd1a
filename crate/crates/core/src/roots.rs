//! Bracketed scalar root finding: bisection with an optional Newton polish.

use crate::error::{Error, Result};

const MAX_BISECT: usize = 400;

/// Finds the root of an increasing function `f` on `[lo, hi]`.
///
/// Requires `f(lo) <= 0 <= f(hi)`. Bisection runs until the bracket stops
/// shrinking in floating point, so the result is the closest representable
/// point to the sign change.
pub fn bisect_increasing<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> Result<f64> {
    if !(lo.is_finite() && hi.is_finite()) || lo > hi {
        return Err(Error::BadArgs(format!("bad bracket [{lo}, {hi}]")));
    }
    let (flo, fhi) = (f(lo), f(hi));
    if flo > 0.0 || fhi < 0.0 {
        return Err(Error::BadArgs(format!("bracket [{lo}, {hi}] does not straddle a root (f = {flo}, {fhi})")));
    }
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    for _ in 0..MAX_BISECT {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // pick the endpoint with the smaller residual
    Ok(if f(lo).abs() <= f(hi).abs() { lo } else { hi })
}

/// One Newton step from `x`, kept only if it stays in `[lo, hi]` and
/// reduces the residual.
pub fn newton_polish<F, D>(f: F, df: D, x: f64, lo: f64, hi: f64) -> f64
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let fx = f(x);
    let d = df(x);
    if fx == 0.0 || d == 0.0 || !d.is_finite() {
        return x;
    }
    let cand = x - fx / d;
    if cand.is_finite() && cand >= lo && cand <= hi && f(cand).abs() < fx.abs() {
        cand
    } else {
        x
    }
}
