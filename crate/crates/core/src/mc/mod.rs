//! Monte Carlo lab: seeded noise models, exceedance certificates with exact
//! binomial intervals, truncated mgf estimates and moment-condition audits.

pub mod audit;
pub mod cert;
pub mod grid;
pub mod mgf;
pub mod model;
pub mod rng;
pub mod subspace;
pub mod tail;

pub use audit::{audit_moment_condition, mean_variance_identity_check, AuditReport, AuditRow, MeanVarianceReport};
pub use cert::{clopper_pearson, McCertificate, Verdict};
pub use grid::{gaussian_certification_grid, sup_norm_median_fraction, GridPoint};
pub use mgf::{estimate_truncated_mgf, gaussian_mgf, truncated_mgf_bound, truncation_radius, MgfEstimate};
pub use model::{NoiseKind, NoiseModel};
pub use subspace::{random_orthogonal, random_projector, random_subprojector};
pub use tail::{estimate_tail, Statistic, TailQuery};
