use serde::Serialize;

use super::cert::McCertificate;
use super::model::{NoiseKind, NoiseModel};
use super::rng::map_chunks;
use super::tail::{estimate_tail, TailQuery};
use crate::bounds::gaussian_quantile;
use crate::constrained::sup_norm_r_star;
use crate::error::Result;

pub const STANDARD_P: [usize; 4] = [2, 5, 10, 50];
pub const STANDARD_X: [f64; 4] = [0.5, 1.0, 2.0, 4.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridPoint {
    pub p: usize,
    pub x: f64,
    pub threshold: f64,
    pub certificate: McCertificate,
}

/// Certifies `P(||xi||^2 > p + sqrt(kappa x p) v (kappa x)) <= e^{-x}` for
/// Gaussian `xi` at every `(p, x)` pair.
pub fn gaussian_certification_grid(ps: &[usize], xs: &[f64], n: usize, conf: f64, seed: u64) -> Result<Vec<GridPoint>> {
    let mut out = Vec::with_capacity(ps.len() * xs.len());
    for &p in ps {
        let model = NoiseModel::new(NoiseKind::Gaussian, p, seed);
        for &x in xs {
            let b = gaussian_quantile(p, x)?;
            let certificate = estimate_tail(&model, &TailQuery::l2(b.threshold, n, conf, b.prob_bound))?;
            out.push(GridPoint { p, x, threshold: b.threshold, certificate });
        }
    }
    Ok(out)
}

/// Fraction of standard normal `m`-vectors with `||eps||_inf <= sqrt(2 log m)`.
pub fn sup_norm_median_fraction(m: usize, n: usize, seed: u64) -> Result<f64> {
    let r = sup_norm_r_star(m)?;
    let model = NoiseModel::new(NoiseKind::Gaussian, m, seed);
    let inside: u64 = map_chunks(seed, n, |rng, len| {
        let mut v = vec![0.0; m];
        let mut c = 0u64;
        for _ in 0..len {
            model.fill(rng, &mut v);
            if v.iter().all(|x| x.abs() <= r) {
                c += 1;
            }
        }
        c
    })
    .into_iter()
    .sum();
    Ok(inside as f64 / n as f64)
}
