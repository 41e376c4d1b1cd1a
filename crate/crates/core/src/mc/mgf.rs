use serde::Serialize;

use super::model::NoiseModel;
use super::rng::map_chunks;
use crate::error::{Error, Result};
use crate::linalg::{log_det_complement, QuadFormSpec};

/// Running `sum exp(e_i)` and `sum exp(2 e_i)` held relative to the largest
/// exponent seen so far.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogSumExp {
    pub max: f64,
    pub s1: f64,
    pub s2: f64,
    pub count: u64,
}

impl Default for LogSumExp {
    fn default() -> Self {
        Self { max: f64::NEG_INFINITY, s1: 0.0, s2: 0.0, count: 0 }
    }
}

impl LogSumExp {
    /// Adds one term `exp(e)`; `e = -inf` contributes zero.
    pub fn push(&mut self, e: f64) {
        self.count += 1;
        if e == f64::NEG_INFINITY {
            return;
        }
        if e > self.max {
            let r = (self.max - e).exp();
            self.s1 = self.s1 * r + 1.0;
            self.s2 = self.s2 * r * r + 1.0;
            self.max = e;
        } else {
            let t = (e - self.max).exp();
            self.s1 += t;
            self.s2 += t * t;
        }
    }

    pub fn merge(mut self, other: Self) -> Self {
        if other.max > self.max {
            return other.merge(self);
        }
        self.count += other.count;
        if other.max == f64::NEG_INFINITY {
            return self;
        }
        let r = (other.max - self.max).exp();
        self.s1 += other.s1 * r;
        self.s2 += other.s2 * r * r;
        self
    }

    /// `log` of the sample mean of `exp(e_i)`.
    pub fn log_mean(&self) -> f64 {
        self.max + (self.s1 / self.count as f64).ln()
    }

    /// Sample mean and its standard error.
    pub fn mean_and_se(&self) -> (f64, f64) {
        if self.max == f64::NEG_INFINITY {
            return (0.0, 0.0);
        }
        let n = self.count as f64;
        let scale = self.max.exp();
        let m1 = self.s1 / n;
        let m2 = self.s2 / n;
        let var = (m2 - m1 * m1).max(0.0) * n / (n - 1.0).max(1.0);
        (scale * m1, scale * (var / n).sqrt())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MgfEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub log_estimate: f64,
    pub n_samples: u64,
}

/// Monte Carlo estimate of `E exp(mu ||B xi||^2 / 2) 1{||B^2 xi|| <= radius}`.
///
/// `B` is represented by the spectrum of `B^2` and acts diagonally, which is
/// exact in distribution for rotation-invariant noise and for diagonal `B`.
pub fn estimate_truncated_mgf(
    model: &NoiseModel,
    spec: &QuadFormSpec,
    mu: f64,
    radius: f64,
    n: usize,
) -> Result<MgfEstimate> {
    if n < 2 {
        return Err(Error::BadArgs(format!("need at least 2 samples, got {n}")));
    }
    if !(mu >= 0.0) {
        return Err(Error::NegativeArgument(mu));
    }
    if mu * spec.lambda_star >= 1.0 {
        return Err(Error::MuTooLarge { product: mu * spec.lambda_star });
    }
    if radius.is_nan() {
        return Err(Error::NonFinite("radius"));
    }
    let eig = spec.spectrum.eigenvalues();
    if eig.len() != model.dim {
        return Err(Error::BadArgs(format!("spectrum has {} entries, model dim is {}", eig.len(), model.dim)));
    }
    let r_sq = radius * radius;
    let parts = map_chunks(model.seed, n, |rng, len| {
        let mut xi = vec![0.0; model.dim];
        let mut acc = LogSumExp::default();
        for _ in 0..len {
            model.fill(rng, &mut xi);
            let (mut q, mut q2) = (0.0, 0.0);
            for (a, x) in eig.iter().zip(&xi) {
                let s = x * x;
                q += a * s;
                q2 += a * a * s;
            }
            acc.push(if q2 <= r_sq { 0.5 * mu * q } else { f64::NEG_INFINITY });
        }
        acc
    });
    let acc = parts.into_iter().fold(LogSumExp::default(), LogSumExp::merge);
    let (estimate, std_error) = acc.mean_and_se();
    Ok(MgfEstimate { estimate, std_error, log_estimate: acc.log_mean(), n_samples: acc.count })
}

/// `det(I - mu B^2)^{-1/2}`, the Gaussian value of `E exp(mu ||B xi||^2 / 2)`.
pub fn gaussian_mgf(spec: &QuadFormSpec, mu: f64) -> Result<f64> {
    Ok((-0.5 * log_det_complement(&spec.spectrum, mu)?).exp())
}

/// Truncation radius `g / mu - sqrt(p / mu)` paired with the `2 (1 - mu)^{-p/2}` bound.
pub fn truncation_radius(g: f64, p: usize, mu: f64) -> f64 {
    g / mu - (p as f64 / mu).sqrt()
}

/// `2 (1 - mu)^{-p/2}`, the bound on the truncated moment for `B = I_p`.
pub fn truncated_mgf_bound(p: usize, mu: f64) -> f64 {
    2.0 * (-0.5 * p as f64 * (-mu).ln_1p()).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{quadform_spec, Spectrum};
    use crate::mc::model::NoiseKind;
    use approx::assert_relative_eq;

    fn spec(e: &[f64]) -> QuadFormSpec {
        quadform_spec(&Spectrum::new(e.to_vec()).unwrap()).unwrap()
    }

    #[test]
    fn lse_never_overflows() {
        let mut a = LogSumExp::default();
        for e in [700.0, 699.0, 650.0, f64::NEG_INFINITY] {
            a.push(e);
        }
        let expect = 700.0 + ((1.0 + (-1.0f64).exp() + (-50.0f64).exp()) / 4.0).ln();
        assert_relative_eq!(a.log_mean(), expect, max_relative = 1e-15);
        let (m, se) = a.mean_and_se();
        assert!(m.is_finite() && se.is_finite());
    }

    #[test]
    fn lse_merge_is_order_free() {
        let vals: Vec<f64> = (0..50).map(|i| (i as f64 * 0.37).sin() * 30.0).collect();
        let mut whole = LogSumExp::default();
        vals.iter().for_each(|&v| whole.push(v));
        let (mut a, mut b) = (LogSumExp::default(), LogSumExp::default());
        vals[..20].iter().for_each(|&v| a.push(v));
        vals[20..].iter().for_each(|&v| b.push(v));
        assert_relative_eq!(a.merge(b).log_mean(), whole.log_mean(), max_relative = 1e-14);
        assert_relative_eq!(b.merge(a).log_mean(), whole.log_mean(), max_relative = 1e-14);
    }

    #[test]
    fn gaussian_identity_two_dims() {
        let m = NoiseModel::new(NoiseKind::Gaussian, 2, 5);
        let s = spec(&[1.0, 1.0]);
        let e = estimate_truncated_mgf(&m, &s, 0.5, f64::INFINITY, 200_000).unwrap();
        assert_relative_eq!(gaussian_mgf(&s, 0.5).unwrap(), 2.0, max_relative = 1e-14);
        assert!((e.estimate - 2.0).abs() < 0.05, "{e:?}");
    }

    #[test]
    fn mu_zero_is_probability() {
        let m = NoiseModel::new(NoiseKind::Gaussian, 3, 5);
        let e = estimate_truncated_mgf(&m, &spec(&[1.0; 3]), 0.0, 1.5, 50_000).unwrap();
        assert!(e.estimate <= 1.0 && e.estimate > 0.0);
        let e = estimate_truncated_mgf(&m, &spec(&[1.0; 3]), 0.0, f64::INFINITY, 1000).unwrap();
        assert_eq!(e.estimate, 1.0);
    }

    #[test]
    fn rademacher_below_truncated_bound() {
        let m = NoiseModel::new(NoiseKind::Rademacher, 5, 5);
        let e = estimate_truncated_mgf(&m, &spec(&[1.0; 5]), 0.5, f64::INFINITY, 100_000).unwrap();
        // ||xi||^2 = 5 deterministically
        assert_relative_eq!(e.estimate, (1.25f64).exp(), max_relative = 1e-12);
        assert!(e.estimate + 3.0 * e.std_error <= truncated_mgf_bound(5, 0.5));
    }

    #[test]
    fn mu_too_large() {
        let m = NoiseModel::new(NoiseKind::Gaussian, 2, 5);
        assert!(matches!(estimate_truncated_mgf(&m, &spec(&[2.0, 1.0]), 0.5, 1.0, 100), Err(Error::MuTooLarge { .. })));
    }
}
