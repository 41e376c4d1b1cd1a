//! Bounds on `||B xi||` and `||B xi||^2` for a symmetric matrix `B`, and the
//! rescaled variant `||D0^-1 zeta||^2`.

use nalgebra::DMatrix;

use crate::constants::{MU_CAP, SLICING_CONST};
use crate::error::{Error, Result};
use crate::linalg::{log_det_complement, quadform_spec, spectrum_of_psd, QuadFormSpec, SymmetricMatrix};

use super::gaussian::{gaussian_bform_quantile, max_form_deviation};
use super::l2::{large_deviation_threshold, solve_w_c, LargeDeviationTail};
use super::profile::{nu0_reduce, MomentProfile};
use super::types::{BoundSource, CriticalQuantities, Regime, TailBound, ThresholdKind};

const NORMALIZED_TOL: f64 = 1e-12;

/// Divides the spectrum by `lambda_star`, returning the normalized spec and
/// the scale. Squared-norm thresholds on the normalized form are multiplied
/// by the scale to get back to `B`.
pub fn normalize_lambda(spec: &QuadFormSpec) -> Result<(QuadFormSpec, f64)> {
    let scale = spec.lambda_star;
    if !(scale > 0.0) {
        return Err(Error::ZeroMatrix);
    }
    if scale == 1.0 {
        return Ok((spec.clone(), 1.0));
    }
    let s = spec.spectrum.scaled(1.0 / scale)?;
    Ok((quadform_spec(&s)?, scale))
}

/// Critical quantities for a normalized quadratic form (`lambda_star = 1`).
///
/// `mu_c = w_c^2 / (1 + w_c^2)` capped at 2/3, `y_c^2 = (1 + w_c^2) p_eff`,
/// `2 x_c = mu_c y_c^2 + log det(I - mu_c B^2)`. The slope `g_c` is
/// `g w_c / (1 + w_c)`, tied to the uncapped parameter so the slicing bound
/// is anchored at `y_c`.
pub fn critical_quantities_bform(g: f64, spec: &QuadFormSpec) -> Result<CriticalQuantities> {
    if (spec.lambda_star - 1.0).abs() > NORMALIZED_TOL {
        return Err(Error::NotNormalized { lambda_star: spec.lambda_star });
    }
    let p_eff = spec.p_eff;
    let w_c = solve_w_c(g, p_eff)?;
    let w2 = w_c * w_c;
    let mu_ld = w2 / (1.0 + w2);
    let mu_c = mu_ld.min(MU_CAP);
    let y_sq = (1.0 + w2) * p_eff;
    let x_c = 0.5 * (mu_c * y_sq + log_det_complement(&spec.spectrum, mu_c)?);
    Ok(CriticalQuantities { w0: g / p_eff.sqrt(), w_c, mu_c, mu_ld, y_c: y_sq.sqrt(), x_c, g_c: g * w_c / (1.0 + w_c) })
}

/// Quantile `z(x, B)` with `P(||B xi||^2 >= z) <= prob_bound`.
///
/// Needs `g^2 >= 2 p_eff` on the normalized scale. For `x <= x_c` the
/// threshold is `p_eff + (2 v sqrt x) v (4 x / mu_c)`, which is the familiar
/// `6 x` branch once `mu_c` sits at its 2/3 cap; it is capped at `y_c^2`.
/// Beyond `x_c` the threshold is `(y_c + 2 (x - x_c) / g_c)^2`. Thresholds are
/// returned on the scale of `B`.
pub fn bform_quantile(profile: &MomentProfile, spec: &QuadFormSpec, x: f64) -> Result<TailBound> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::BadArgs(format!("x must be positive and finite, got {x}")));
    }
    let (reduced, _) = nu0_reduce(profile, 1.0);
    let nu_scale = profile.nu0() * profile.nu0();
    let g = reduced.g();
    if g.is_infinite() {
        let mut b = gaussian_bform_quantile(spec, x)?;
        b.threshold *= nu_scale;
        return Ok(b);
    }
    let (norm, scale) = normalize_lambda(spec)?;
    if g * g < 2.0 * norm.p_eff {
        return Err(Error::GTooSmall {
            bound: "quadratic-form quantile",
            condition: "g^2 >= 2 p_eff / lambda_max",
            g_sq: g * g,
            required: 2.0 * norm.p_eff,
        });
    }
    let cq = critical_quantities_bform(g, &norm)?;
    let bound = if x <= cq.x_c {
        let (dev, regime) = max_form_deviation(norm.v(), 4.0 / cq.mu_c, x);
        TailBound {
            threshold: (norm.p_eff + dev).min(cq.y_c * cq.y_c),
            threshold_kind: ThresholdKind::SquaredNorm,
            prob_bound: 2.0 * (-x).exp() + SLICING_CONST * (-cq.x_c).exp(),
            regime,
            source: BoundSource::QuadFormQuantile,
        }
    } else {
        TailBound {
            threshold: large_deviation_threshold(&cq, x),
            threshold_kind: ThresholdKind::SquaredNorm,
            prob_bound: SLICING_CONST * (-x).exp(),
            regime: Regime::LargeDeviation,
            source: BoundSource::QuadFormQuantile,
        }
    };
    Ok(TailBound { threshold: bound.threshold * scale * nu_scale, ..bound })
}

/// Slicing bound on `P(||B xi|| > y)` for `y` at or beyond the critical radius.
///
/// Sharp form `8.4 det{I - (g_c / y) B^2}^{-1/2} exp(-g_c y / 2)`, linearized
/// form `8.4 exp(-x_c - g_c (y - y_c) / 2)`, both on the normalized scale.
pub fn bform_large_dev_tail(profile: &MomentProfile, spec: &QuadFormSpec, y: f64) -> Result<LargeDeviationTail> {
    let (reduced, y_red) = nu0_reduce(profile, y);
    let g = reduced.g();
    if g.is_infinite() {
        return Err(Error::NonFinite("g (the large-deviation zone is empty when g = inf)"));
    }
    let (norm, scale) = normalize_lambda(spec)?;
    let root_scale = scale.sqrt();
    let y_n = y_red / root_scale;
    let cq = critical_quantities_bform(g, &norm)?;
    let unit = profile.nu0() * root_scale;
    if y_n < cq.y_c * (1.0 - 1e-12) {
        return Err(Error::YBelowCritical { y, y_crit: cq.y_c * unit });
    }
    let y_eval = y_n.max(cq.y_c);
    let log_det = log_det_complement(&norm.spectrum, cq.g_c / y_eval)?;
    let sharp = SLICING_CONST * (-0.5 * cq.g_c * y_eval - 0.5 * log_det).exp();
    let linearized = SLICING_CONST * (-cq.x_c - 0.5 * cq.g_c * (y_eval - cq.y_c)).exp();
    Ok(LargeDeviationTail {
        sharp: TailBound {
            threshold: y,
            threshold_kind: ThresholdKind::Norm,
            prob_bound: sharp,
            regime: Regime::LargeDeviation,
            source: BoundSource::QuadFormLargeDeviation,
        },
        linearized,
        y0: cq.y_c * unit,
        x0: cq.x_c,
        g0: cq.g_c,
    })
}

/// `QuadFormSpec` of `B^2 = D0^-1 V0^2 D0^-1`.
pub fn rescaled_spec(v0: &SymmetricMatrix, d0: &SymmetricMatrix) -> Result<QuadFormSpec> {
    if v0.dim() != d0.dim() {
        return Err(Error::BadArgs(format!("V0 is {0}x{0} but D0 is {1}x{1}", v0.dim(), d0.dim())));
    }
    let chol = d0.as_matrix().clone().cholesky().ok_or(Error::D0NotPD)?;
    let d_inv: DMatrix<f64> = chol.inverse();
    let v = v0.as_matrix();
    let b2 = &d_inv * v * v * &d_inv;
    let b2 = SymmetricMatrix::from_symmetric_unchecked(b2);
    quadform_spec(&spectrum_of_psd(&b2)?)
}

/// Quadratic-form quantile for `||D0^-1 zeta||^2` when `V0^-1 zeta` satisfies
/// the moment condition.
pub fn rescaled_bound(
    v0: &SymmetricMatrix,
    d0: &SymmetricMatrix,
    profile: &MomentProfile,
    x: f64,
) -> Result<TailBound> {
    let spec = rescaled_spec(v0, d0)?;
    let b = bform_quantile(profile, &spec, x)?;
    Ok(TailBound { source: BoundSource::Rescaled, ..b })
}
