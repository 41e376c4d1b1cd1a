//! Bounds under an additional norm constraint: the joint event
//! `{||xi||^2 > z, ||xi||_s <= u_s}`, sub-projector images, vectors under the
//! Bernstein moment condition, and the Baraud comparison bound.

use serde::Serialize;

use crate::bounds::gaussian::{kappa_deviation, max_form_deviation, phi_unchecked};
use crate::bounds::{BoundSource, Regime, TailBound, ThresholdKind};
use crate::constants::MU_CAP;
use crate::error::{Error, Result};
use crate::linalg::{log_det_complement, QuadFormSpec};
use crate::roots::{bisect_increasing, newton_polish};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    SupNorm,
    Custom,
}

/// Alternative norm `||.||_s` with exponential moments for `||gamma||_s <= g_s`,
/// Gaussian median radius `r_star` and constraint level `u_s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormConstraint {
    pub norm_kind: NormKind,
    pub g_s: f64,
    pub r_star: f64,
    pub u_s: f64,
}

impl NormConstraint {
    /// `g_s` may be infinite; the other fields must be positive and finite.
    pub fn new(norm_kind: NormKind, g_s: f64, r_star: f64, u_s: f64) -> Result<Self> {
        if !(g_s > 0.0) {
            return Err(Error::BadConstraint(format!("g_s must be positive, got {g_s}")));
        }
        for (name, v) in [("r_star", r_star), ("u_s", u_s)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::BadConstraint(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(Self { norm_kind, g_s, r_star, u_s })
    }

    /// Sup-norm constraint in dimension `m`, with `r_star = sqrt(2 log m)`.
    pub fn sup_norm(g_s: f64, m: usize, u_s: f64) -> Result<Self> {
        Self::new(NormKind::SupNorm, g_s, sup_norm_r_star(m)?, u_s)
    }

    /// `g_s / mu - r_star / sqrt(mu)`.
    pub fn level_map(&self, mu: f64) -> f64 {
        self.g_s / mu - self.r_star / mu.sqrt()
    }

    pub fn is_admissible_for_subprojector(&self) -> bool {
        self.g_s >= self.r_star + self.u_s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstrainedCriticals {
    pub z_s: f64,
    pub mu_s: Option<f64>,
    pub x_s: f64,
}

impl ConstrainedCriticals {
    pub fn is_infinite(&self) -> bool {
        self.z_s.is_infinite()
    }
}

/// `mu(z) = (z - p) / z`.
pub fn mu_of_z(p: usize, z: f64) -> Result<f64> {
    if !(z > p as f64) {
        return Err(Error::ZNotAbovePDim { z, p });
    }
    Ok((z - p as f64) / z)
}

/// Root `z_s` of `g_s / mu(z) - r_star / sqrt(mu(z)) = u_s`.
///
/// With `s = mu^{-1/2}` the equation reads `g_s s^2 - r_star s = u_s`, which
/// is increasing for `s >= r_star / (2 g_s)`; the larger root is found by
/// bisection. When `u_s <= g_s - r_star` there is no root with `mu < 1` and
/// all criticals are infinite.
pub fn solve_z_s(c: &NormConstraint, p: usize) -> Result<ConstrainedCriticals> {
    if p == 0 {
        return Err(Error::DimTooSmall(p));
    }
    let infinite = ConstrainedCriticals { z_s: f64::INFINITY, mu_s: None, x_s: f64::INFINITY };
    if c.g_s.is_infinite() || c.u_s <= c.g_s - c.r_star {
        return Ok(infinite);
    }
    let (g, r, u) = (c.g_s, c.r_star, c.u_s);
    let h = |s: f64| g * s * s - r * s - u;
    let lo = 1.0f64.max(r / (2.0 * g));
    let mut hi = 2.0 * lo;
    while h(hi) < 0.0 {
        hi *= 2.0;
    }
    let s = bisect_increasing(h, lo, hi)?;
    let s = newton_polish(h, |s| 2.0 * g * s - r, s, lo, hi);
    let mu = 1.0 / (s * s);
    if !(mu < 1.0) {
        return Ok(infinite);
    }
    let pf = p as f64;
    let z_s = pf / (1.0 - mu);
    let x_s = 0.5 * (mu * z_s + pf * (-mu).ln_1p());
    Ok(ConstrainedCriticals { z_s, mu_s: Some(mu), x_s })
}

/// Bound on `P(||xi||^2 > z, ||xi||_s <= u_s)`.
///
/// For `z <= z_s`: `2 exp{-(p/2) phi((z - p)/p)}`. Beyond `z_s`:
/// `2 exp{-mu_s z / 2 - (p/2) log(1 - mu_s)} = 2 exp{-x_s - mu_s (z - z_s)/2}`.
pub fn constrained_tail(c: &NormConstraint, p: usize, z: f64) -> Result<TailBound> {
    mu_of_z(p, z)?;
    let cr = solve_z_s(c, p)?;
    let pf = p as f64;
    let (prob_bound, regime) = match cr.mu_s {
        Some(mu) if z > cr.z_s => (2.0 * (-0.5 * mu * z - 0.5 * pf * (-mu).ln_1p()).exp(), Regime::LargeDeviation),
        _ => {
            let u = z - pf;
            let regime = if u <= pf { Regime::SubGaussian } else { Regime::SubExponential };
            (2.0 * (-0.5 * pf * phi_unchecked(u / pf)).exp(), regime)
        }
    };
    Ok(TailBound {
        threshold: z,
        threshold_kind: ThresholdKind::SquaredNorm,
        prob_bound,
        regime,
        source: BoundSource::NormConstrained,
    })
}

/// The alternative large-`z` form `2 exp{-x_s - g_s (z - z_s)/2}`, or `None`
/// when `z` is not beyond a finite `z_s`.
pub fn constrained_tail_slope_form(c: &NormConstraint, p: usize, z: f64) -> Result<Option<f64>> {
    mu_of_z(p, z)?;
    let cr = solve_z_s(c, p)?;
    if cr.is_infinite() || z <= cr.z_s {
        return Ok(None);
    }
    Ok(Some(2.0 * (-cr.x_s - 0.5 * c.g_s * (z - cr.z_s)).exp()))
}

fn check_subprojector(spec: &QuadFormSpec) -> Result<()> {
    let max_eigenvalue = spec.lambda_star;
    if max_eigenvalue > 1.0 + 1e-9 {
        return Err(Error::SpectrumNotSubProjector { max_eigenvalue });
    }
    Ok(())
}

/// `2 exp(mu_s^2 v^2 / 4)`, the bound on the truncated exponential moment of
/// `(mu_s / 2)(||Pi xi||^2 - p_eff)` for a sub-projector `Pi`.
pub fn subprojector_exp_moment_bound(spec: &QuadFormSpec, mu_s: f64) -> Result<f64> {
    if !(mu_s >= 0.0) {
        return Err(Error::NegativeArgument(mu_s));
    }
    if mu_s > MU_CAP {
        return Err(Error::MuTooLarge { product: mu_s });
    }
    check_subprojector(spec)?;
    Ok(2.0 * (mu_s * mu_s * spec.v_sq / 4.0).exp())
}

/// `-log det(I - mu Pi^2)` and its quadratic majorant `mu p_eff + mu^2 v^2 / 2`.
pub fn subprojector_log_det_chain(spec: &QuadFormSpec, mu: f64) -> Result<(f64, f64)> {
    check_subprojector(spec)?;
    let lhs = -log_det_complement(&spec.spectrum, mu)?;
    Ok((lhs, mu * spec.p_eff + 0.5 * mu * mu * spec.v_sq))
}

/// `P(||Pi xi||^2 > p_eff + (2 v sqrt x) v (6 x), ||Pi^2 xi||_s <= u_s) <= 2 e^{-x}`.
pub fn subprojector_quantile(c: &NormConstraint, spec: &QuadFormSpec, x: f64) -> Result<TailBound> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::BadArgs(format!("x must be positive and finite, got {x}")));
    }
    check_subprojector(spec)?;
    if !c.is_admissible_for_subprojector() {
        return Err(Error::AssumptionViolated(format!("g_s = {} is below r_star + u_s = {}", c.g_s, c.r_star + c.u_s)));
    }
    let (dev, regime) = max_form_deviation(spec.v(), 6.0, x);
    Ok(TailBound {
        threshold: spec.p_eff + dev,
        threshold_kind: ThresholdKind::SquaredNorm,
        prob_bound: 2.0 * (-x).exp(),
        regime,
        source: BoundSource::SubProjector,
    })
}

/// Bernstein moment condition `log E exp(lambda zeta_i) <= lambda^2 sigma^2 / (1 - c |lambda|)`
/// in ambient dimension `n`, projected onto a subspace of dimension `p_bar`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BernsteinProfile {
    pub sigma: f64,
    pub c: f64,
    pub ambient_dim: usize,
    pub subspace_dim: usize,
}

impl BernsteinProfile {
    pub fn new(sigma: f64, c: f64, ambient_dim: usize, subspace_dim: usize) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::BadArgs(format!("sigma must be positive and finite, got {sigma}")));
        }
        if !(c >= 0.0) || !c.is_finite() {
            return Err(Error::BadArgs(format!("c must be nonnegative and finite, got {c}")));
        }
        if subspace_dim == 0 || subspace_dim > ambient_dim {
            return Err(Error::BadArgs(format!("subspace dimension {subspace_dim} must lie in 1..={ambient_dim}")));
        }
        Ok(Self { sigma, c, ambient_dim, subspace_dim })
    }

    /// `g_s = sigma / c`, infinite when `c = 0`.
    pub fn g_s(&self) -> f64 {
        if self.c == 0.0 {
            f64::INFINITY
        } else {
            self.sigma / self.c
        }
    }

    /// Sup-norm constraint on `zeta / (2 sigma)` at level `u_s`.
    pub fn constraint(&self, u_s: f64) -> Result<NormConstraint> {
        NormConstraint::sup_norm(self.g_s(), self.ambient_dim, u_s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BernsteinBound {
    /// Threshold on `||Pi_S zeta||^2 / (4 sigma^2)`.
    pub scaled: TailBound,
    /// Threshold on `||Pi_S zeta||^2`.
    pub unscaled: TailBound,
}

/// `P(||Pi_S zeta||^2 / (4 sigma^2) > p_bar + sqrt(kappa x p_bar) v (kappa x),
/// ||Pi_S zeta||_inf <= 2 sigma u_s) <= 2 e^{-x}`.
pub fn bernstein_quantile(profile: &BernsteinProfile, u_s: f64, x: f64) -> Result<BernsteinBound> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::BadArgs(format!("x must be positive and finite, got {x}")));
    }
    let c = profile.constraint(u_s)?;
    if !c.is_admissible_for_subprojector() {
        return Err(Error::AssumptionViolated(format!(
            "g_s = sigma / c = {} is below u_s + r_star = {}",
            c.g_s,
            c.u_s + c.r_star
        )));
    }
    let p = profile.subspace_dim as f64;
    let (dev, regime) = kappa_deviation(p, x);
    let scaled = TailBound {
        threshold: p + dev,
        threshold_kind: ThresholdKind::SquaredNorm,
        prob_bound: 2.0 * (-x).exp(),
        regime,
        source: BoundSource::Bernstein,
    };
    let unscaled = TailBound { threshold: scaled.threshold * 4.0 * profile.sigma * profile.sigma, ..scaled };
    Ok(BernsteinBound { scaled, unscaled })
}

/// `P(||Pi_S zeta|| > (3 sigma v sqrt(6 c u)) sqrt(x + 3 p_bar)) <= e^{-x}`.
pub fn baraud_quantile(profile: &BernsteinProfile, u_level: f64, x: f64) -> Result<TailBound> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::BadArgs(format!("x must be positive and finite, got {x}")));
    }
    if !(u_level >= 0.0) || !u_level.is_finite() {
        return Err(Error::BadArgs(format!("u_level must be nonnegative and finite, got {u_level}")));
    }
    let scale = (3.0 * profile.sigma).max((6.0 * profile.c * u_level).sqrt());
    let p = profile.subspace_dim as f64;
    Ok(TailBound {
        threshold: scale * (x + 3.0 * p).sqrt(),
        threshold_kind: ThresholdKind::Norm,
        prob_bound: (-x).exp(),
        regime: Regime::SubGaussian,
        source: BoundSource::Baraud,
    })
}

/// `sqrt(2 log m)`, the median radius of the sup-norm of a standard normal
/// vector in dimension `m`.
pub fn sup_norm_r_star(m: usize) -> Result<f64> {
    if m < 2 {
        return Err(Error::DimTooSmall(m));
    }
    Ok((2.0 * (m as f64).ln()).sqrt())
}
