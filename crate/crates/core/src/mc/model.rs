use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use super::rng::{map_chunks_serial, substream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    /// Standard normal coordinates.
    Gaussian,
    /// Uniform signs.
    Rademacher,
    /// `X - 1` with `X` standard exponential.
    CenteredExponential,
}

impl NoiseKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            NoiseKind::Gaussian => "gaussian",
            NoiseKind::Rademacher => "rademacher",
            NoiseKind::CenteredExponential => "centered_exponential",
        }
    }

    /// Whether `log E exp(gamma^T xi) <= ||gamma||^2 / 2` holds for every `gamma`.
    pub fn is_sub_gaussian(&self) -> bool {
        !matches!(self, NoiseKind::CenteredExponential)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub kind: NoiseKind,
    pub dim: usize,
    pub seed: u64,
}

impl NoiseModel {
    pub fn new(kind: NoiseKind, dim: usize, seed: u64) -> Self {
        Self { kind, dim, seed }
    }

    pub fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self.kind {
            NoiseKind::Gaussian => rng.sample(StandardNormal),
            NoiseKind::Rademacher => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            NoiseKind::CenteredExponential => {
                let e: f64 = rng.sample(Exp1);
                e - 1.0
            }
        }
    }

    pub fn fill(&self, rng: &mut ChaCha8Rng, out: &mut [f64]) {
        for v in out.iter_mut() {
            *v = self.draw(rng);
        }
    }

    /// `n` vectors, identical to the ones seen by the parallel estimators.
    pub fn sample_vectors(&self, n: usize) -> Vec<Vec<f64>> {
        map_chunks_serial(self.seed, n, |rng, len| {
            (0..len)
                .map(|_| {
                    let mut v = vec![0.0; self.dim];
                    self.fill(rng, &mut v);
                    v
                })
                .collect::<Vec<_>>()
        })
        .into_iter()
        .flatten()
        .collect()
    }

    /// Fresh generator for auxiliary draws tied to this model's seed.
    pub fn aux_rng(&self) -> ChaCha8Rng {
        substream(self.seed, super::rng::AUX_STREAM)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        let m = NoiseModel::new(NoiseKind::Gaussian, 4, 11);
        assert_eq!(m.sample_vectors(2), m.sample_vectors(2));
        let other = NoiseModel::new(NoiseKind::Gaussian, 4, 12);
        assert_ne!(m.sample_vectors(2), other.sample_vectors(2));
    }

    #[test]
    fn prefix_stable() {
        let m = NoiseModel::new(NoiseKind::Rademacher, 3, 5);
        let long = m.sample_vectors(5000);
        assert_eq!(&long[..10], &m.sample_vectors(10)[..]);
    }

    #[test]
    fn rademacher_signs() {
        let m = NoiseModel::new(NoiseKind::Rademacher, 7, 3);
        let s = m.sample_vectors(1000);
        assert!(s.iter().flatten().all(|&v| v == 1.0 || v == -1.0));
        let plus = s.iter().flatten().filter(|&&v| v > 0.0).count();
        assert!((plus as f64 / 7000.0 - 0.5).abs() < 0.03);
    }

    #[test]
    fn centered_exponential_mean() {
        let m = NoiseModel::new(NoiseKind::CenteredExponential, 1, 9);
        for &n in &[10_000usize, 400_000] {
            let mean = m.sample_vectors(n).iter().map(|v| v[0]).sum::<f64>() / n as f64;
            // unit variance
            assert!(mean.abs() < 4.0 / (n as f64).sqrt(), "n={n} mean={mean}");
        }
        assert!(m.sample_vectors(1000).iter().all(|v| v[0] >= -1.0));
    }
}
