//! Finite-sample deviation bounds for squared norms and quadratic forms of
//! random vectors with exponential moments, together with a Monte Carlo lab
//! that certifies them and a regression front end that turns a design into
//! critical values.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod constants;
pub mod constrained;
pub mod error;
pub mod linalg;
pub mod mc;
pub mod regression;
pub mod roots;

pub use bounds::{
    bform_large_dev_tail, bform_quantile, critical_quantities_bform, critical_quantities_l2, gaussian_bform_quantile,
    gaussian_quantile, gaussian_tail, l2_large_dev_tail, l2_quantile, nu0_reduce, phi, phi_inverse, rescaled_bound,
    rescaled_spec, solve_w_c, BoundSource, CriticalQuantities, LargeDeviationTail, MomentProfile, Regime, TailBound,
    ThresholdKind,
};
pub use constants::{KAPPA, MU_CAP, SLICING_CONST};
pub use constrained::{
    baraud_quantile, bernstein_quantile, constrained_tail, solve_z_s, subprojector_quantile, sup_norm_r_star,
    BernsteinBound, BernsteinProfile, ConstrainedCriticals, NormConstraint, NormKind,
};
pub use error::{Error, Result};
pub use linalg::{quadform_spec, QuadFormSpec, Spectrum, SymmetricMatrix};
pub use mc::{McCertificate, NoiseKind, NoiseModel, Verdict};
pub use regression::{effective_sample_size, wilks_critical_values, DesignModel, EffectiveSampleInfo};
