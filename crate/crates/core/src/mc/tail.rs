use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::cert::McCertificate;
use super::model::NoiseModel;
use super::rng::map_chunks;
use crate::error::{Error, Result};
use crate::linalg::QuadFormSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    /// `||xi||^2`.
    L2Sq,
    /// `||B xi||^2`, evaluated in the eigenbasis of `B^2` as `sum_i a_i xi_i^2`.
    BFormSq,
    /// `||Pi xi||^2` for an explicit matrix `Pi`.
    ProjectedSq,
}

/// Exceedance query `P(stat > threshold)`, optionally jointly with
/// `||image||_inf <= sup_cap` where `image` is the vector whose squared norm
/// is the statistic.
#[derive(Debug, Clone, PartialEq)]
pub struct TailQuery {
    pub statistic: Statistic,
    pub spec: Option<QuadFormSpec>,
    pub projector: Option<DMatrix<f64>>,
    pub sup_cap: Option<f64>,
    pub threshold: f64,
    pub n: usize,
    pub conf: f64,
    pub bound: f64,
}

impl TailQuery {
    pub fn l2(threshold: f64, n: usize, conf: f64, bound: f64) -> Self {
        Self { statistic: Statistic::L2Sq, spec: None, projector: None, sup_cap: None, threshold, n, conf, bound }
    }
}

enum Image<'a> {
    Identity,
    Diagonal(Vec<f64>),
    Matrix(&'a DMatrix<f64>),
}

pub const MIN_TAIL_SAMPLES: usize = 1000;

pub fn estimate_tail(model: &NoiseModel, q: &TailQuery) -> Result<McCertificate> {
    if q.n < MIN_TAIL_SAMPLES {
        return Err(Error::BadArgs(format!("need at least {MIN_TAIL_SAMPLES} samples, got {}", q.n)));
    }
    if q.threshold.is_nan() || q.threshold == f64::INFINITY {
        return Err(Error::NonFinite("threshold"));
    }
    let dim = model.dim;
    let image = match q.statistic {
        Statistic::L2Sq => Image::Identity,
        Statistic::BFormSq => {
            let spec = q.spec.as_ref().ok_or(Error::SpecMissing)?;
            let eig = spec.spectrum.eigenvalues();
            if eig.len() != dim {
                return Err(Error::BadArgs(format!("spectrum has {} entries, model dim is {dim}", eig.len())));
            }
            Image::Diagonal(eig.iter().map(|a| a.sqrt()).collect())
        }
        Statistic::ProjectedSq => {
            let m = q.projector.as_ref().ok_or(Error::SpecMissing)?;
            if m.ncols() != dim {
                return Err(Error::BadArgs(format!("projector has {} columns, model dim is {dim}", m.ncols())));
            }
            Image::Matrix(m)
        }
    };
    let counts = map_chunks(model.seed, q.n, |rng, len| {
        let mut xi = DVector::zeros(dim);
        let mut img = DVector::zeros(match &image {
            Image::Matrix(m) => m.nrows(),
            _ => dim,
        });
        let mut hits = 0u64;
        for _ in 0..len {
            model.fill(rng, xi.as_mut_slice());
            match &image {
                Image::Identity => img.copy_from(&xi),
                Image::Diagonal(d) => {
                    for i in 0..dim {
                        img[i] = d[i] * xi[i];
                    }
                }
                Image::Matrix(m) => img.gemv(1.0, m, &xi, 0.0),
            }
            let stat = img.norm_squared();
            let capped = q.sup_cap.is_none_or(|c| img.amax() <= c);
            if stat > q.threshold && capped {
                hits += 1;
            }
        }
        hits
    });
    McCertificate::from_counts(counts.iter().sum(), q.n as u64, q.conf, q.bound)
}
