use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Haar-distributed orthogonal matrix from the QR factorization of a
/// Gaussian matrix, with the signs of `R`'s diagonal folded into `Q`.
pub fn random_orthogonal<R: Rng>(dim: usize, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::from_fn(dim, dim, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// `Q diag(eigenvalues) Q^T` for a random orthogonal `Q`; a sub-projector when
/// every eigenvalue lies in `[0, 1]`.
pub fn random_subprojector<R: Rng>(eigenvalues: &[f64], rng: &mut R) -> Result<DMatrix<f64>> {
    if eigenvalues.is_empty() {
        return Err(Error::EmptySpectrum);
    }
    if let Some(&bad) = eigenvalues.iter().find(|a| !(0.0..=1.0).contains(*a)) {
        return Err(Error::SpectrumNotSubProjector { max_eigenvalue: bad });
    }
    let q = random_orthogonal(eigenvalues.len(), rng);
    let d = DMatrix::from_diagonal(&DVector::from_column_slice(eigenvalues));
    let m = &q * d * q.transpose();
    Ok((&m + m.transpose()) * 0.5)
}

/// Random rank-`k` orthogonal projector in dimension `n`.
pub fn random_projector<R: Rng>(n: usize, k: usize, rng: &mut R) -> Result<DMatrix<f64>> {
    if k == 0 || k > n {
        return Err(Error::BadArgs(format!("projector rank {k} must lie in 1..={n}")));
    }
    let mut e = vec![1.0; k];
    e.resize(n, 0.0);
    random_subprojector(&e, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mc::rng::substream;
    use approx::assert_relative_eq;

    #[test]
    fn orthogonal() {
        let q = random_orthogonal(6, &mut substream(1, 0));
        let err = (&q.transpose() * &q - DMatrix::identity(6, 6)).amax();
        assert!(err < 1e-12);
    }

    #[test]
    fn projector_is_idempotent_with_trace_k() {
        let p = random_projector(8, 3, &mut substream(2, 0)).unwrap();
        assert!((&p * &p - &p).amax() < 1e-12);
        assert_relative_eq!(p.trace(), 3.0, epsilon = 1e-12);
    }

    #[test]
    fn subprojector_spectrum() {
        let e = [0.9, 0.5, 0.1, 0.0];
        let p = random_subprojector(&e, &mut substream(3, 0)).unwrap();
        let mut got: Vec<f64> = p.symmetric_eigenvalues().iter().copied().collect();
        got.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (a, b) in got.iter().zip(&e) {
            assert_relative_eq!(a, b, epsilon = 1e-12);
        }
        assert!(random_subprojector(&[1.2], &mut substream(3, 0)).is_err());
    }
}
