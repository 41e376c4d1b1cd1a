//! Baseline bounds for a standard normal vector and for Gaussian quadratic forms.

use crate::constants::KAPPA;
use crate::error::{Error, Result};
use crate::linalg::QuadFormSpec;
use crate::roots::{bisect_increasing, newton_polish};

use super::types::{BoundSource, Regime, TailBound, ThresholdKind};

/// `phi(t) = t - ln(1 + t)`, the Cramer rate of a chi-square variable.
pub fn phi(t: f64) -> Result<f64> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::NegativeArgument(t));
    }
    Ok(phi_unchecked(t))
}

pub(crate) fn phi_unchecked(t: f64) -> f64 {
    if t < 1e-3 {
        // t - ln(1+t) cancels badly near zero; use the alternating series
        let t2 = t * t;
        t2 * (0.5 - t / 3.0 + t2 / 4.0 - t2 * t / 5.0 + t2 * t2 / 6.0)
    } else {
        t - t.ln_1p()
    }
}

/// Inverse of `phi` on `[0, inf)`.
pub fn phi_inverse(u: f64) -> Result<f64> {
    if u.is_nan() || u < 0.0 {
        return Err(Error::NegativeArgument(u));
    }
    if u == 0.0 {
        return Ok(0.0);
    }
    if u.is_infinite() {
        return Ok(f64::INFINITY);
    }
    let hi = u + 2.0 + 2.0 * u.sqrt();
    let f = |t: f64| phi_unchecked(t) - u;
    let t = bisect_increasing(f, 0.0, hi)?;
    Ok(newton_polish(f, |t| t / (1.0 + t), t, 0.0, hi))
}

fn check_p(p: usize) -> Result<f64> {
    if p == 0 {
        return Err(Error::BadArgs("dimension p must be >= 1".into()));
    }
    Ok(p as f64)
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::BadArgs(format!("{name} must be positive and finite, got {v}")));
    }
    Ok(())
}

/// `P(||xi||^2 > p + u) <= exp{-(p/2) phi(u/p)}` for standard normal `xi`.
pub fn gaussian_tail(p: usize, u: f64) -> Result<TailBound> {
    let pf = check_p(p)?;
    check_positive("u", u)?;
    let prob_bound = (-0.5 * pf * phi_unchecked(u / pf)).exp();
    Ok(TailBound {
        threshold: pf + u,
        threshold_kind: ThresholdKind::SquaredNorm,
        prob_bound,
        regime: if u <= pf { Regime::SubGaussian } else { Regime::SubExponential },
        source: BoundSource::GaussianNorm,
    })
}

/// Deviation `sqrt(kappa x p) v (kappa x)` and whether the square-root branch is active.
pub(crate) fn kappa_deviation(p: f64, x: f64) -> (f64, Regime) {
    let root = (KAPPA * x * p).sqrt();
    let lin = KAPPA * x;
    if x <= p / KAPPA {
        (root.max(lin), Regime::SubGaussian)
    } else {
        (root.max(lin), Regime::SubExponential)
    }
}

/// `P(||xi||^2 > p + sqrt(kappa x p) v (kappa x)) <= e^{-x}`, `kappa = 6.6`.
pub fn gaussian_quantile(p: usize, x: f64) -> Result<TailBound> {
    let pf = check_p(p)?;
    check_positive("x", x)?;
    let (dev, regime) = kappa_deviation(pf, x);
    Ok(TailBound {
        threshold: pf + dev,
        threshold_kind: ThresholdKind::SquaredNorm,
        prob_bound: (-x).exp(),
        regime,
        source: BoundSource::GaussianNorm,
    })
}

/// Deviation `(2 v sqrt(x)) v (lin x)` of the quadratic-form quantile.
pub(crate) fn max_form_deviation(v: f64, lin: f64, x: f64) -> (f64, Regime) {
    let root = 2.0 * v * x.sqrt();
    let linear = lin * x;
    if root >= linear {
        (root, Regime::SubGaussian)
    } else {
        (linear, Regime::SubExponential)
    }
}

/// `P(||B xi||^2 > p_eff + (2 v sqrt(x)) v (6 a* x)) <= e^{-x}` for standard normal `xi`.
pub fn gaussian_bform_quantile(spec: &QuadFormSpec, x: f64) -> Result<TailBound> {
    check_positive("x", x)?;
    let (dev, regime) = max_form_deviation(spec.v(), 6.0 * spec.lambda_star, x);
    Ok(TailBound {
        threshold: spec.p_eff + dev,
        threshold_kind: ThresholdKind::SquaredNorm,
        prob_bound: (-x).exp(),
        regime,
        source: BoundSource::GaussianQuadForm,
    })
}
