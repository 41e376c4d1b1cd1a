//! Bound kernels: the Gaussian baseline, the `l2` bound, general quadratic
//! forms and rescaled vectors.

pub mod bform;
pub mod gaussian;
pub mod l2;
pub mod profile;
pub mod types;

pub use bform::{
    bform_large_dev_tail, bform_quantile, critical_quantities_bform, normalize_lambda, rescaled_bound, rescaled_spec,
};
pub use gaussian::{gaussian_bform_quantile, gaussian_quantile, gaussian_tail, phi, phi_inverse};
pub use l2::{
    critical_quantities_l2, g_c_via_mu, l2_large_dev_tail, l2_quantile, solve_w_c, w_c_residual, LargeDeviationTail,
};
pub use profile::{nu0_reduce, MomentProfile};
pub use types::{BoundSource, CriticalQuantities, Regime, TailBound, ThresholdKind};
