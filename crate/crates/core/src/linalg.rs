//! Symmetric-matrix numerics shared by the bound kernels: spectra of `B^2`,
//! the trace functionals `tr(B^2)`, `2 tr(B^4)`, `lambda_max(B^2)`, and
//! `log det(I - mu B^2)`.

use std::io::Read;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::constants::{DEFAULT_SYM_TOL, EIG_CLAMP};
use crate::error::{Error, Result};

const EIGEN_EPS: f64 = f64::EPSILON;
const EIGEN_MAX_ITER: usize = 10_000;

/// A dense real symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    inner: DMatrix<f64>,
    max_asymmetry: f64,
}

impl SymmetricMatrix {
    /// Validates `raw` with the default relative tolerance and symmetrizes it.
    pub fn new(raw: DMatrix<f64>) -> Result<Self> {
        symmetrize_and_validate(raw, DEFAULT_SYM_TOL)
    }

    pub fn from_rows(rows: &[Vec<f64>], tol: f64) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::NonSquare { rows: n, cols: bad.len() });
        }
        let m = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        symmetrize_and_validate(m, tol)
    }

    pub fn identity(p: usize) -> Self {
        Self { inner: DMatrix::identity(p, p), max_asymmetry: 0.0 }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let v = nalgebra::DVector::from_column_slice(diag);
        Self { inner: DMatrix::from_diagonal(&v), max_asymmetry: 0.0 }
    }

    /// Wraps a matrix that is symmetric by construction, averaging away roundoff.
    pub(crate) fn from_symmetric_unchecked(m: DMatrix<f64>) -> Self {
        let avg = (&m + m.transpose()) * 0.5;
        Self { inner: avg, max_asymmetry: 0.0 }
    }

    pub fn dim(&self) -> usize {
        self.inner.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.inner
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.inner
    }

    /// Largest `|M[i][j] - M[j][i]|` seen in the raw input.
    pub fn max_asymmetry(&self) -> f64 {
        self.max_asymmetry
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { inner: &self.inner * c, max_asymmetry: self.max_asymmetry * c.abs() }
    }

    /// Eigenvalues of the matrix itself, descending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let eig = self.inner.clone().try_symmetric_eigen(EIGEN_EPS, EIGEN_MAX_ITER).ok_or(Error::EigenFailure)?;
        let mut v: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        v.sort_by(|a, b| b.total_cmp(a));
        Ok(v)
    }

    /// `M^{1/2}` for a PSD matrix, through its eigendecomposition.
    pub fn psd_sqrt(&self) -> Result<SymmetricMatrix> {
        let eig = self.inner.clone().try_symmetric_eigen(EIGEN_EPS, EIGEN_MAX_ITER).ok_or(Error::EigenFailure)?;
        let scale = eig.eigenvalues.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let mut roots = eig.eigenvalues.clone();
        for v in roots.iter_mut() {
            if *v < -EIG_CLAMP * scale {
                return Err(Error::NegativeEigenvalue { value: *v });
            }
            *v = v.max(0.0).sqrt();
        }
        let q = &eig.eigenvectors;
        let m = q * DMatrix::from_diagonal(&roots) * q.transpose();
        Ok(Self::from_symmetric_unchecked(m))
    }
}

/// Checks squareness, finiteness and symmetry of `raw` and returns `(raw + raw^T)/2`.
///
/// Symmetry is relative: `|M[i][j] - M[j][i]| <= tol * max(1, |M[i][j]|)`.
pub fn symmetrize_and_validate(raw: DMatrix<f64>, tol: f64) -> Result<SymmetricMatrix> {
    let (r, c) = raw.shape();
    if r != c {
        return Err(Error::NonSquare { rows: r, cols: c });
    }
    if r == 0 {
        return Err(Error::EmptySpectrum);
    }
    for i in 0..r {
        for j in 0..c {
            if !raw[(i, j)].is_finite() {
                return Err(Error::NonFiniteEntry { row: i, col: j });
            }
        }
    }
    let mut max_asym = 0.0f64;
    for i in 0..r {
        for j in (i + 1)..c {
            let d = (raw[(i, j)] - raw[(j, i)]).abs();
            max_asym = max_asym.max(d);
            let scale = 1.0f64.max(raw[(i, j)].abs()).max(raw[(j, i)].abs());
            if d > tol * scale {
                return Err(Error::AsymmetryExceedsTol { max_asymmetry: d, tol });
            }
        }
    }
    let sym = (&raw + raw.transpose()) * 0.5;
    Ok(SymmetricMatrix { inner: sym, max_asymmetry: max_asym })
}

/// Eigenvalues `a_1 >= ... >= a_p >= 0` of a squared symmetric matrix `B^2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
}

impl Spectrum {
    /// Builds a spectrum from eigenvalues of a PSD matrix in any order.
    ///
    /// Values within `-1e-10` (relative to the largest magnitude) of zero are
    /// clamped to zero; anything more negative is rejected.
    pub fn new(mut eigenvalues: Vec<f64>) -> Result<Self> {
        if eigenvalues.is_empty() {
            return Err(Error::EmptySpectrum);
        }
        if eigenvalues.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("eigenvalue"));
        }
        let scale = eigenvalues.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for v in eigenvalues.iter_mut() {
            if *v < -EIG_CLAMP * scale {
                return Err(Error::NegativeEigenvalue { value: *v });
            }
            if *v < EIG_CLAMP * scale {
                *v = v.max(0.0);
            }
        }
        eigenvalues.sort_by(|a, b| b.total_cmp(a));
        Ok(Self { eigenvalues })
    }

    /// All-ones spectrum of `B = I_p`.
    pub fn identity(p: usize) -> Result<Self> {
        Self::new(vec![1.0; p])
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn source_dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn largest(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// Multiplies every eigenvalue by `c >= 0` (the spectrum of `(sqrt(c) B)^2`).
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.eigenvalues.iter().map(|a| a * c).collect())
    }
}

/// Spectrum of `B^2` from the eigenvalues of `B`, squared.
pub fn spectrum_of_square(b: &SymmetricMatrix) -> Result<Spectrum> {
    let eig = b.eigenvalues()?;
    Spectrum::new(eig.into_iter().map(|l| l * l).collect())
}

/// Spectrum of a matrix that is itself a PSD square such as `D^-1 V^2 D^-1`.
pub fn spectrum_of_psd(m: &SymmetricMatrix) -> Result<Spectrum> {
    Spectrum::new(m.eigenvalues()?)
}

/// Trace functionals of `B^2`: `p_eff = tr(B^2)`, `v_sq = 2 tr(B^4)`,
/// `lambda_star = lambda_max(B^2)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadFormSpec {
    pub spectrum: Spectrum,
    pub p_eff: f64,
    pub v_sq: f64,
    pub lambda_star: f64,
}

impl QuadFormSpec {
    /// `v = sqrt(v_sq)`.
    pub fn v(&self) -> f64 {
        self.v_sq.sqrt()
    }

    pub fn dim(&self) -> usize {
        self.spectrum.source_dim()
    }
}

pub fn quadform_spec(s: &Spectrum) -> Result<QuadFormSpec> {
    if s.eigenvalues.is_empty() {
        return Err(Error::EmptySpectrum);
    }
    let p_eff: f64 = s.eigenvalues.iter().sum();
    let v_sq = 2.0 * s.eigenvalues.iter().map(|a| a * a).sum::<f64>();
    Ok(QuadFormSpec { spectrum: s.clone(), p_eff, v_sq, lambda_star: s.largest() })
}

/// `log det(I - mu B^2) = sum_i ln(1 - mu a_i)`.
pub fn log_det_complement(s: &Spectrum, mu: f64) -> Result<f64> {
    if !mu.is_finite() {
        return Err(Error::NonFinite("mu"));
    }
    let product = mu * s.largest();
    if product >= 1.0 {
        return Err(Error::MuTooLarge { product });
    }
    Ok(s.eigenvalues.iter().map(|a| (-mu * a).ln_1p()).sum())
}

/// Reads a `p x p` matrix from headerless CSV of plain decimals.
pub fn read_matrix_csv<R: Read>(reader: R, tol: f64) -> Result<SymmetricMatrix> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).flexible(true).from_reader(reader);
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = rec
            .iter()
            .enumerate()
            .map(|(j, cell)| {
                cell.parse::<f64>().map_err(|_| Error::Parse(format!("row {}, column {}: '{cell}'", i + 1, j + 1)))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse("matrix file is empty".into()));
    }
    SymmetricMatrix::from_rows(&rows, tol)
}
