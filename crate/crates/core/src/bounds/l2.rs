//! Bounds on `||xi||` and `||xi||^2` under the exponential moment condition.

use serde::Serialize;

use crate::constants::SLICING_CONST;
use crate::error::{Error, Result};
use crate::roots::{bisect_increasing, newton_polish};

use super::gaussian::{gaussian_quantile, kappa_deviation, phi_unchecked};
use super::profile::{nu0_reduce, MomentProfile};
use super::types::{BoundSource, CriticalQuantities, Regime, TailBound, ThresholdKind};

/// `w (1 + w) / sqrt(1 + w^2)`, strictly increasing on `[0, inf)`.
fn frontier_map(w: f64) -> f64 {
    w * (1.0 + w) / (1.0 + w * w).sqrt()
}

fn frontier_map_derivative(w: f64) -> f64 {
    let s = 1.0 + w * w;
    (1.0 + 2.0 * w + w * w * w) / (s * s.sqrt())
}

/// Solves `w (1 + w) / sqrt(1 + w^2) = g / sqrt(p_eff)` for `w`.
///
/// The root is bracketed by `[w0 / sqrt 2, w0]` with `w0 = g / sqrt(p_eff)`.
pub fn solve_w_c(g: f64, p_eff: f64) -> Result<f64> {
    if !g.is_finite() {
        return Err(Error::NonFinite("g"));
    }
    if !(g > 0.0) {
        return Err(Error::BadArgs(format!("g must be positive, got {g}")));
    }
    if !(p_eff > 0.0) || !p_eff.is_finite() {
        return Err(Error::BadArgs(format!("p_eff must be positive, got {p_eff}")));
    }
    let w0 = g / p_eff.sqrt();
    let lo = w0 / std::f64::consts::SQRT_2;
    let f = |w: f64| frontier_map(w) - w0;
    let w = bisect_increasing(f, lo, w0)?;
    Ok(newton_polish(f, frontier_map_derivative, w, lo, w0))
}

/// Residual of the frontier equation at `w` (exposed for verification).
pub fn w_c_residual(w: f64, g: f64, p_eff: f64) -> f64 {
    frontier_map(w) - g / p_eff.sqrt()
}

/// Critical quantities for `B = I_p`.
pub fn critical_quantities_l2(g: f64, p: usize) -> Result<CriticalQuantities> {
    if p == 0 {
        return Err(Error::BadArgs("dimension p must be >= 1".into()));
    }
    let pf = p as f64;
    let w_c = solve_w_c(g, pf)?;
    let w2 = w_c * w_c;
    let mu_c = w2 / (1.0 + w2);
    Ok(CriticalQuantities {
        w0: g / pf.sqrt(),
        w_c,
        mu_c,
        mu_ld: mu_c,
        y_c: ((1.0 + w2) * pf).sqrt(),
        x_c: 0.5 * pf * phi_unchecked(w2),
        g_c: g * w_c / (1.0 + w_c),
    })
}

/// `g - sqrt(mu_ld p)`, the second expression for the slope `g_c`.
pub fn g_c_via_mu(g: f64, cq: &CriticalQuantities, p_eff: f64) -> f64 {
    g - (cq.mu_ld * p_eff).sqrt()
}

/// Quantile `z(x, p)` with `P(||xi||^2 >= z) <= prob_bound`.
///
/// Needs `g^2 >= p` after the `nu0` reduction. For `x <= x_c` the threshold is
/// `p + sqrt(kappa x p) v (kappa x)`, capped at `y_c^2` because the moderate
/// bound only speaks about `||xi|| <= y_c`; beyond `x_c` it is
/// `(y_c + 2 (x - x_c) / g_c)^2`. `g = inf` falls back to the Gaussian quantile.
pub fn l2_quantile(profile: &MomentProfile, p: usize, x: f64) -> Result<TailBound> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::BadArgs(format!("x must be positive and finite, got {x}")));
    }
    let (reduced, _) = nu0_reduce(profile, 1.0);
    let scale = profile.nu0() * profile.nu0();
    let g = reduced.g();
    if g.is_infinite() {
        let mut b = gaussian_quantile(p, x)?;
        b.threshold *= scale;
        return Ok(b);
    }
    let pf = p as f64;
    if g * g < pf {
        return Err(Error::GTooSmall { bound: "l2 quantile", condition: "g^2 >= p", g_sq: g * g, required: pf });
    }
    let cq = critical_quantities_l2(g, p)?;
    let slicing = SLICING_CONST * (-cq.x_c).exp();
    let bound = if x <= cq.x_c {
        let (dev, regime) = kappa_deviation(pf, x);
        TailBound {
            threshold: (pf + dev).min(cq.y_c * cq.y_c),
            threshold_kind: ThresholdKind::SquaredNorm,
            prob_bound: 2.0 * (-x).exp() + slicing,
            regime,
            source: BoundSource::L2Quantile,
        }
    } else {
        TailBound {
            threshold: large_deviation_threshold(&cq, x),
            threshold_kind: ThresholdKind::SquaredNorm,
            prob_bound: SLICING_CONST * (-x).exp(),
            regime: Regime::LargeDeviation,
            source: BoundSource::L2Quantile,
        }
    };
    Ok(TailBound { threshold: bound.threshold * scale, ..bound })
}

/// `z_c(x) = (y_c + 2 (x - x_c) / g_c)^2`.
pub(crate) fn large_deviation_threshold(cq: &CriticalQuantities, x: f64) -> f64 {
    let y = cq.y_c + 2.0 * (x - cq.x_c) / cq.g_c;
    y * y
}

/// A slicing bound on `P(||.|| > y)` in its sharp and linearized forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LargeDeviationTail {
    /// The sharp form; `threshold` is `y` on the norm.
    pub sharp: TailBound,
    /// `8.4 exp{-x0 - g0 (y - y0) / 2}`, never below the sharp form.
    pub linearized: f64,
    /// Anchor radius `y0` in the caller's units.
    pub y0: f64,
    pub x0: f64,
    pub g0: f64,
}

/// Slicing bound on `P(||xi|| > y)` for `y >= y0 = g / mu0 - sqrt(p / mu0)`.
///
/// `mu0` defaults to `mu_c`, which puts the anchor at `(y_c, x_c)`.
pub fn l2_large_dev_tail(profile: &MomentProfile, p: usize, y: f64, mu0: Option<f64>) -> Result<LargeDeviationTail> {
    if p == 0 {
        return Err(Error::BadArgs("dimension p must be >= 1".into()));
    }
    let (reduced, y_red) = nu0_reduce(profile, y);
    let g = reduced.g();
    if g.is_infinite() {
        return Err(Error::NonFinite("g (the large-deviation zone is empty when g = inf)"));
    }
    let pf = p as f64;
    let mu0 = match mu0 {
        Some(m) => m,
        None => critical_quantities_l2(g, p)?.mu_c,
    };
    if !(mu0 > 0.0 && mu0 < 1.0) || mu0 * pf >= g * g {
        return Err(Error::MuInvalid { mu0 });
    }
    let y0 = g / mu0 - (pf / mu0).sqrt();
    let g0 = g - (mu0 * pf).sqrt();
    let x0 = 0.5 * (mu0 * y0 * y0 + pf * (-mu0).ln_1p());
    let nu0 = profile.nu0();
    if y_red < y0 * (1.0 - 1e-12) {
        return Err(Error::YBelowCritical { y, y_crit: y0 * nu0 });
    }
    let y_eval = y_red.max(y0);
    let sharp_exp = -0.5 * g0 * y_eval - 0.5 * pf * (-g0 / y_eval).ln_1p();
    Ok(LargeDeviationTail {
        sharp: TailBound {
            threshold: y,
            threshold_kind: ThresholdKind::Norm,
            prob_bound: SLICING_CONST * sharp_exp.exp(),
            regime: Regime::LargeDeviation,
            source: BoundSource::L2LargeDeviation,
        },
        linearized: SLICING_CONST * (-x0 - 0.5 * g0 * (y_eval - y0)).exp(),
        y0: y0 * nu0,
        x0,
        g0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::KAPPA;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    /// Plain bisection on the frontier equation, no shared code with the solver.
    fn w_c_oracle(w0: f64) -> f64 {
        let (mut lo, mut hi) = (0.0f64, w0.max(1.0) * 2.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid * (1.0 + mid) / (1.0 + mid * mid).sqrt() > w0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn w_c_at_unit_w0() {
        // 40-digit bisection: 0.71667274928228663842...
        let w = solve_w_c(3.0, 9.0).unwrap();
        assert_relative_eq!(w, 0.716_672_749_282_286_6, epsilon = 1e-14);
        assert_relative_eq!(w, w_c_oracle(1.0), epsilon = 1e-13);
    }

    #[test]
    fn w_c_small_w0_vanishes() {
        let w = solve_w_c(1e-8, 1.0).unwrap();
        assert!(w < 1e-8 && w > 1e-8 / 2f64.sqrt());
        assert!(solve_w_c(f64::INFINITY, 1.0).is_err());
    }

    #[test]
    fn critical_quantities_examples() {
        let p = 9usize;
        let cq = critical_quantities_l2(3.0, p).unwrap();
        assert_relative_eq!(cq.mu_c, 0.339_332_122_592_393_2, epsilon = 1e-13);

        // g = 10, p = 10 checked against a 40-digit evaluation
        let cq = critical_quantities_l2(10.0, 10).unwrap();
        assert_relative_eq!(cq.w_c, 2.421_349_310_352_632, epsilon = 1e-12);
        assert_relative_eq!(cq.y_c, 8.284_281_793_097_797, epsilon = 1e-12);
        assert_relative_eq!(cq.x_c, 19.683_988_283_651_076, epsilon = 1e-11);
        assert_relative_eq!(cq.g_c, 7.077_176_548_521_051, epsilon = 1e-12);
    }

    #[test]
    fn critical_lower_bounds_when_g_large() {
        for &(g, p) in &[(3.0, 9usize), (10.0, 10), (50.0, 20), (5.0, 25)] {
            let cq = critical_quantities_l2(g, p).unwrap();
            let pf = p as f64;
            assert!(cq.y_c * cq.y_c >= cq.w_c * cq.w_c * pf);
            assert!(cq.w_c * cq.w_c * pf >= g * g / 2.0 - 1e-12);
            let w0_sq = g * g / pf;
            assert!(0.5 * KAPPA * (w0_sq - w0_sq.ln_1p()) >= 3.3 * (1.0 - std::f64::consts::LN_2));
            // with w_c in place of w0 the frontier clears p only once g^2 >= ~1.985 p
            assert_eq!(KAPPA * cq.x_c > pf, w0_sq >= 1.985);
        }
        let edge = critical_quantities_l2(1.4088 * 10f64.sqrt(), 10).unwrap();
        assert!(KAPPA * edge.x_c > 10.0);
        let edge = critical_quantities_l2(1.4087 * 10f64.sqrt(), 10).unwrap();
        assert!(KAPPA * edge.x_c < 10.0);
    }

    #[test]
    fn l2_quantile_examples() {
        let prof = MomentProfile::standard(10.0).unwrap();
        let b = l2_quantile(&prof, 10, 1.0).unwrap();
        assert_eq!(b.regime, Regime::SubGaussian);
        assert_relative_eq!(b.threshold, 10.0 + 66f64.sqrt(), epsilon = 1e-12);

        let cq = critical_quantities_l2(10.0, 10).unwrap();
        let at = l2_quantile(&prof, 10, cq.x_c * (1.0 + 1e-15) + 1e-12).unwrap();
        assert_eq!(at.regime, Regime::LargeDeviation);
        assert_relative_eq!(large_deviation_threshold(&cq, cq.x_c), cq.y_c * cq.y_c, epsilon = 1e-10);
        assert_relative_eq!(at.threshold, cq.y_c * cq.y_c, max_relative = 1e-9);

        let too_small = MomentProfile::standard(2.0).unwrap();
        assert!(matches!(l2_quantile(&too_small, 10, 1.0), Err(Error::GTooSmall { .. })));

        let gauss = l2_quantile(&MomentProfile::gaussian(), 10, 1.0).unwrap();
        assert_eq!(gauss, gaussian_quantile(10, 1.0).unwrap());
    }

    #[test]
    fn large_dev_threshold_grows_in_x() {
        let prof = MomentProfile::standard(10.0).unwrap();
        let cq = critical_quantities_l2(10.0, 10).unwrap();
        let mut prev = 0.0;
        for i in 1..200 {
            let x = cq.x_c + 0.25 * i as f64;
            let t = l2_quantile(&prof, 10, x).unwrap().threshold;
            assert!(t > prev);
            prev = t;
        }
    }

    #[test]
    fn large_dev_tail_anchor_and_ordering() {
        let prof = MomentProfile::standard(10.0).unwrap();
        let cq = critical_quantities_l2(10.0, 10).unwrap();
        let at = l2_large_dev_tail(&prof, 10, cq.y_c, None).unwrap();
        let anchor = SLICING_CONST * (-cq.x_c).exp();
        assert_relative_eq!(at.sharp.prob_bound, anchor, max_relative = 1e-10);
        assert_relative_eq!(at.linearized, anchor, max_relative = 1e-10);

        let mut prev = f64::INFINITY;
        for i in 0..400 {
            let y = cq.y_c + 0.05 * i as f64;
            let t = l2_large_dev_tail(&prof, 10, y, None).unwrap();
            assert!(t.sharp.prob_bound <= t.linearized * (1.0 + 1e-12));
            assert!(t.sharp.prob_bound <= prev);
            prev = t.sharp.prob_bound;
        }
        assert!(matches!(l2_large_dev_tail(&prof, 10, cq.y_c * 0.9, None), Err(Error::YBelowCritical { .. })));
        assert!(matches!(l2_large_dev_tail(&prof, 10, 20.0, Some(1.0)), Err(Error::MuInvalid { .. })));
        assert!(matches!(l2_large_dev_tail(&prof, 200, 200.0, Some(0.9)), Err(Error::MuInvalid { .. })));
    }

    #[test]
    fn nu0_tail_equivalence() {
        let raw = MomentProfile::new(2.0, 5.0).unwrap();
        let reduced = MomentProfile::standard(10.0).unwrap();
        let cq = critical_quantities_l2(10.0, 6).unwrap();
        for i in 0..50 {
            let y_red = cq.y_c + 0.3 * i as f64;
            let a = l2_large_dev_tail(&raw, 6, 2.0 * y_red, None).unwrap();
            let b = l2_large_dev_tail(&reduced, 6, y_red, None).unwrap();
            assert_relative_eq!(a.sharp.prob_bound, b.sharp.prob_bound, max_relative = 1e-12);
            assert_relative_eq!(a.linearized, b.linearized, max_relative = 1e-12);
        }
        for &x in &[0.5, 1.0, 3.0, 30.0] {
            let a = l2_quantile(&raw, 6, x).unwrap();
            let b = l2_quantile(&reduced, 6, x).unwrap();
            assert_relative_eq!(a.threshold, 4.0 * b.threshold, max_relative = 1e-12);
            assert_eq!(a.prob_bound, b.prob_bound);
        }
    }

    proptest! {
        #[test]
        fn w_c_bracket_and_residual(log_w0 in -2.0f64..2.0, p in 1usize..500) {
            let w0 = 10f64.powf(log_w0);
            let g = w0 * (p as f64).sqrt();
            let w = solve_w_c(g, p as f64).unwrap();
            prop_assert!(w_c_residual(w, g, p as f64).abs() <= 1e-12);
            prop_assert!(w >= w0 / 2f64.sqrt() * (1.0 - 1e-15) && w <= w0 * (1.0 + 1e-15));
        }

        #[test]
        fn g_c_two_forms_agree(log_w0 in -2.0f64..2.0, p in 1usize..500) {
            let g = 10f64.powf(log_w0) * (p as f64).sqrt();
            let cq = critical_quantities_l2(g, p).unwrap();
            let alt = g_c_via_mu(g, &cq, p as f64);
            prop_assert!((cq.g_c - alt).abs() <= 1e-9 * cq.g_c);
        }

        #[test]
        fn l2_quantile_nondecreasing(g_over in 1.0f64..20.0, p in 1usize..60, x in 0.01f64..80.0, dx in 0.0f64..5.0) {
            let g = g_over * (p as f64).sqrt();
            let prof = MomentProfile::standard(g).unwrap();
            let a = l2_quantile(&prof, p, x).unwrap().threshold;
            let b = l2_quantile(&prof, p, x + dx).unwrap().threshold;
            prop_assert!(b >= a * (1.0 - 1e-12));
        }
    }
}
