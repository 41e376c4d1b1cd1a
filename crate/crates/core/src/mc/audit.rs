use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::mgf::LogSumExp;
use super::model::{NoiseKind, NoiseModel};
use super::rng::map_chunks;
use crate::error::{Error, Result};
use crate::linalg::QuadFormSpec;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditRow {
    pub gamma: Vec<f64>,
    pub gamma_norm: f64,
    pub log_mgf: f64,
    pub std_error: f64,
    pub bound: f64,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub kind: NoiseKind,
    pub g: f64,
    pub n_samples: u64,
    pub rows: Vec<AuditRow>,
    pub n_flagged: usize,
}

/// Scale applied to the raw samples before auditing: the centered
/// exponential is audited as `zeta / 2`, the sub-Gaussian models as is.
pub fn audit_scale(kind: NoiseKind) -> f64 {
    match kind {
        NoiseKind::CenteredExponential => 0.5,
        _ => 1.0,
    }
}

/// Directions with radius uniform in `(0, g]`. The radius is Euclidean for
/// the sub-Gaussian models and the sup-norm for the centered exponential.
pub fn audit_directions(model: &NoiseModel, g: f64, n_gamma: usize) -> Vec<Vec<f64>> {
    let mut rng = model.aux_rng();
    (0..n_gamma)
        .map(|_| {
            let mut u: Vec<f64> = (0..model.dim).map(|_| rng.sample(StandardNormal)).collect();
            let size = match model.kind {
                NoiseKind::CenteredExponential => u.iter().fold(0.0f64, |m, v| m.max(v.abs())),
                _ => u.iter().map(|v| v * v).sum::<f64>().sqrt(),
            };
            let t = g * (1.0 - rng.random::<f64>());
            u.iter_mut().for_each(|v| *v *= t / size);
            u
        })
        .collect()
}

/// Estimates `log E exp(gamma^T xi)` for random directions and flags any
/// estimate above `||gamma||^2 / 2 + 3 se`, with a jackknife standard error
/// for the log of the mean.
pub fn audit_moment_condition(model: &NoiseModel, g: f64, n_gamma: usize, n_samples: usize) -> Result<AuditReport> {
    if !(g > 0.0) || !g.is_finite() {
        return Err(Error::BadArgs(format!("audit radius g must be positive and finite, got {g}")));
    }
    if n_samples < 2 || n_gamma == 0 || model.dim == 0 {
        return Err(Error::BadArgs("audit needs n_samples >= 2, n_gamma >= 1 and dim >= 1".into()));
    }
    let gammas = audit_directions(model, g, n_gamma);
    let scale = audit_scale(model.kind);
    let dots = |xi: &[f64], out: &mut [f64]| {
        for (o, gm) in out.iter_mut().zip(&gammas) {
            *o = scale * gm.iter().zip(xi).map(|(a, b)| a * b).sum::<f64>();
        }
    };

    let first = map_chunks(model.seed, n_samples, |rng, len| {
        let mut xi = vec![0.0; model.dim];
        let mut e = vec![0.0; n_gamma];
        let mut acc = vec![LogSumExp::default(); n_gamma];
        for _ in 0..len {
            model.fill(rng, &mut xi);
            dots(&xi, &mut e);
            acc.iter_mut().zip(&e).for_each(|(a, &v)| a.push(v));
        }
        acc
    });
    let totals: Vec<LogSumExp> =
        (0..n_gamma).map(|j| first.iter().map(|c| c[j]).fold(LogSumExp::default(), LogSumExp::merge)).collect();

    let n = n_samples as f64;
    let second = map_chunks(model.seed, n_samples, |rng, len| {
        let mut xi = vec![0.0; model.dim];
        let mut e = vec![0.0; n_gamma];
        let mut sums = vec![(0.0f64, 0.0f64); n_gamma];
        for _ in 0..len {
            model.fill(rng, &mut xi);
            dots(&xi, &mut e);
            for j in 0..n_gamma {
                let t = &totals[j];
                let x = (e[j] - t.max).exp();
                let d = ((t.s1 - n * x) / ((n - 1.0) * t.s1)).ln_1p();
                sums[j].0 += d;
                sums[j].1 += d * d;
            }
        }
        sums
    });

    let rows: Vec<AuditRow> = (0..n_gamma)
        .map(|j| {
            let (s, s2) = second.iter().fold((0.0, 0.0), |acc, c| (acc.0 + c[j].0, acc.1 + c[j].1));
            let var = (n - 1.0) / n * (s2 - s * s / n).max(0.0);
            let norm_sq: f64 = gammas[j].iter().map(|v| v * v).sum();
            let log_mgf = totals[j].log_mean();
            let std_error = var.sqrt();
            let bound = 0.5 * norm_sq;
            AuditRow {
                gamma: gammas[j].clone(),
                gamma_norm: norm_sq.sqrt(),
                log_mgf,
                std_error,
                bound,
                flagged: log_mgf > bound + 3.0 * std_error,
            }
        })
        .collect();
    let n_flagged = rows.iter().filter(|r| r.flagged).count();
    Ok(AuditReport { kind: model.kind, g, n_samples: n_samples as u64, rows, n_flagged })
}

/// Exact per-coordinate log-mgf of `(X - 1)` at `lambda < 1`: `-lambda - log(1 - lambda)`.
pub fn centered_exp_log_mgf(lambda: f64) -> f64 {
    -lambda - (-lambda).ln_1p()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanVarianceReport {
    pub n_samples: u64,
    pub mean: f64,
    pub variance: f64,
    pub p_eff: f64,
    pub v_sq: f64,
    pub mean_ok: bool,
    pub variance_rel_err: f64,
    pub variance_ok: bool,
}

/// Compares the sample mean and variance of `||B xi||^2` for Gaussian `xi`
/// with `p_eff = tr(B^2)` and `v^2 = 2 tr(B^4)`.
pub fn mean_variance_identity_check(spec: &QuadFormSpec, n: usize, seed: u64) -> Result<MeanVarianceReport> {
    if n < 2 {
        return Err(Error::BadArgs(format!("need at least 2 samples, got {n}")));
    }
    let eig = spec.spectrum.eigenvalues();
    let model = NoiseModel::new(NoiseKind::Gaussian, eig.len(), seed);
    let parts = map_chunks(seed, n, |rng, len| {
        let (mut count, mut mean, mut m2) = (0.0f64, 0.0f64, 0.0f64);
        for _ in 0..len {
            let q: f64 = eig
                .iter()
                .map(|a| {
                    let x = model.draw(rng);
                    a * x * x
                })
                .sum();
            count += 1.0;
            let delta = q - mean;
            mean += delta / count;
            m2 += delta * (q - mean);
        }
        (count, mean, m2)
    });
    let (count, mean, m2) = parts.into_iter().fold((0.0, 0.0, 0.0), |(na, ma, sa), (nb, mb, sb)| {
        let nn = na + nb;
        if nn == 0.0 {
            return (0.0, 0.0, 0.0);
        }
        let delta = mb - ma;
        (nn, ma + delta * nb / nn, sa + sb + delta * delta * na * nb / nn)
    });
    let variance = m2 / (count - 1.0);
    let variance_rel_err = if spec.v_sq > 0.0 { (variance - spec.v_sq).abs() / spec.v_sq } else { variance.abs() };
    Ok(MeanVarianceReport {
        n_samples: n as u64,
        mean,
        variance,
        p_eff: spec.p_eff,
        v_sq: spec.v_sq,
        mean_ok: (mean - spec.p_eff).abs() <= 4.0 * (spec.v_sq / n as f64).sqrt(),
        variance_rel_err,
        variance_ok: variance_rel_err <= 0.1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{quadform_spec, Spectrum};
    use approx::assert_relative_eq;

    fn spec(e: &[f64]) -> QuadFormSpec {
        quadform_spec(&Spectrum::new(e.to_vec()).unwrap()).unwrap()
    }

    #[test]
    fn directions_respect_radius() {
        let m = NoiseModel::new(NoiseKind::Gaussian, 4, 1);
        for d in audit_directions(&m, 2.0, 50) {
            let r = d.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!(r > 0.0 && r <= 2.0 + 1e-12);
        }
        let m = NoiseModel::new(NoiseKind::CenteredExponential, 4, 1);
        for d in audit_directions(&m, 1.0, 50) {
            assert!(d.iter().all(|v| v.abs() <= 1.0 + 1e-12));
        }
    }

    #[test]
    fn gaussian_near_equality() {
        let m = NoiseModel::new(NoiseKind::Gaussian, 3, 4);
        let r = audit_moment_condition(&m, 1.0, 5, 200_000).unwrap();
        for row in &r.rows {
            assert!((row.log_mgf - row.bound).abs() <= 5.0 * row.std_error + 1e-3, "{row:?}");
        }
    }

    #[test]
    fn rademacher_single_coordinate() {
        // the audit's jackknife se on a known closed form
        let m = NoiseModel::new(NoiseKind::Rademacher, 1, 4);
        let r = audit_moment_condition(&m, 1.0, 20, 100_000).unwrap();
        for row in &r.rows {
            let t = row.gamma[0];
            assert!((row.log_mgf - t.cosh().ln()).abs() <= 5.0 * row.std_error + 1e-9);
            assert!(!row.flagged);
        }
        assert_relative_eq!(1f64.cosh().ln(), 0.4337808304830271, max_relative = 1e-15);
    }

    #[test]
    fn centered_exponential_chain_on_grid() {
        for i in 1..100 {
            let lambda = i as f64 / 100.0;
            let exact = centered_exp_log_mgf(lambda);
            assert!(exact <= lambda * lambda / (1.0 - lambda));
            let half = centered_exp_log_mgf(lambda / 2.0);
            assert!(half <= lambda * lambda / 2.0);
        }
        let m = NoiseModel::new(NoiseKind::CenteredExponential, 3, 4);
        let r = audit_moment_condition(&m, 1.0, 10, 100_000).unwrap();
        assert_eq!(r.n_flagged, 0);
    }

    #[test]
    fn mean_variance_examples() {
        let r = mean_variance_identity_check(&spec(&[1.0]), 400_000, 1).unwrap();
        assert!(r.mean_ok && r.variance_ok, "{r:?}");
        assert_eq!((r.p_eff, r.v_sq), (1.0, 2.0));
        let r = mean_variance_identity_check(&spec(&[4.0, 1.0]), 400_000, 2).unwrap();
        assert_eq!((r.p_eff, r.v_sq), (5.0, 34.0));
        assert!(r.mean_ok && r.variance_ok, "{r:?}");
        let r = mean_variance_identity_check(&spec(&[0.0, 0.0]), 1000, 2).unwrap();
        assert_eq!((r.mean, r.variance), (0.0, 0.0));
        assert!(r.mean_ok && r.variance_ok);
    }
}
