//! Numerical constants shared by the bound kernels.

/// Deviation constant of the chi-square-type quantile `p + sqrt(kappa x p) v (kappa x)`.
///
/// The exact value `2 / (1 - ln 2)` is about 6.5178; every bound uses the
/// rounded-up 6.6.
pub const KAPPA: f64 = 6.6;

/// Prefactor of the slicing large-deviation bound. Dominates
/// `2 e^{1/2} / (1 - e^{-1/2})`, about 8.3804.
pub const SLICING_CONST: f64 = 8.4;

/// Cap on the exponential-moment parameter used by the quadratic-form bound,
/// the range on which `ln(1 - t) >= -t - t^2` holds.
pub const MU_CAP: f64 = 2.0 / 3.0;

/// Default relative symmetry tolerance for matrix input.
pub const DEFAULT_SYM_TOL: f64 = 1e-9;

/// Eigenvalues of a PSD matrix below this (relative to the largest) are
/// treated as roundoff and clamped to zero.
pub const EIG_CLAMP: f64 = 1e-10;

/// `a0 = 1 - ln 2`, the curvature constant behind `KAPPA`.
pub fn a0() -> f64 {
    1.0 - std::f64::consts::LN_2
}

/// `2 / a0`, the unrounded deviation constant.
pub fn kappa_exact() -> f64 {
    2.0 / a0()
}

/// `2 e^{1/2} / (1 - e^{-1/2})`, the unrounded slicing prefactor.
pub fn slicing_const_exact() -> f64 {
    2.0 * 0.5f64.exp() / (-(-0.5f64).exp_m1())
}
