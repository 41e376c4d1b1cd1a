//! Linear regression front end: effective sample size of a design and the
//! resulting critical values for the squared-norm statistic.

use std::io::Read;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::bounds::{l2_quantile, rescaled_bound, BoundSource, MomentProfile, Regime};
use crate::error::{Error, Result};
use crate::linalg::SymmetricMatrix;

/// Design `Psi` (`p x n`, one column per observation), noise scales `s_i` and
/// the per-observation moment parameters `(nu0, g1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignModel {
    pub psi: DMatrix<f64>,
    pub scales: Vec<f64>,
    pub nu0: f64,
    pub g1: f64,
}

impl DesignModel {
    pub fn new(psi: DMatrix<f64>, scales: Vec<f64>, nu0: f64, g1: f64) -> Result<Self> {
        let (p, n) = psi.shape();
        if p == 0 || n == 0 {
            return Err(Error::BadArgs("design must have at least one row and one column".into()));
        }
        if p > n {
            return Err(Error::BadArgs(format!("dimension p = {p} exceeds sample size n = {n}")));
        }
        if scales.len() != n {
            return Err(Error::BadArgs(format!("{} scales for {n} observations", scales.len())));
        }
        if let Some(s) = scales.iter().find(|s| !(**s > 0.0) || !s.is_finite()) {
            return Err(Error::BadArgs(format!("scales must be positive and finite, got {s}")));
        }
        if psi.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("design entry"));
        }
        if !(nu0 >= 1.0) || !nu0.is_finite() {
            return Err(Error::BadArgs(format!("nu0 must be finite and >= 1, got {nu0}")));
        }
        if !(g1 > 0.0) {
            return Err(Error::BadArgs(format!("g1 must be positive, got {g1}")));
        }
        Ok(Self { psi, scales, nu0, g1 })
    }

    pub fn dim(&self) -> usize {
        self.psi.nrows()
    }

    pub fn n_obs(&self) -> usize {
        self.psi.ncols()
    }

    /// `V0^2 = sum_i s_i^2 Psi_i Psi_i^T`.
    pub fn v0_sq(&self) -> DMatrix<f64> {
        let weighted = DMatrix::from_fn(self.dim(), self.n_obs(), |r, c| self.psi[(r, c)] * self.scales[c]);
        let m = &weighted * weighted.transpose();
        (&m + m.transpose()) * 0.5
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EffectiveSampleInfo {
    pub n_eff: f64,
    pub g_derived: f64,
    #[serde(skip)]
    pub v0: SymmetricMatrix,
}

/// `N^{-1/2} = max_i s_i ||V0^{-1} Psi_i||`, computed with triangular solves
/// against the Cholesky factor of `V0^2`; also `g = g1 sqrt(N)` and `V0`.
pub fn effective_sample_size(model: &DesignModel) -> Result<EffectiveSampleInfo> {
    let v0_sq = model.v0_sq();
    let chol = v0_sq.clone().cholesky().ok_or(Error::RankDeficientDesign)?;
    let l = chol.l();
    let mut worst = 0.0f64;
    for (i, col) in model.psi.column_iter().enumerate() {
        let y =
            l.solve_lower_triangular(&DVector::from_column_slice(col.as_slice())).ok_or(Error::RankDeficientDesign)?;
        worst = worst.max(model.scales[i] * y.norm());
    }
    if !(worst > 0.0) || !worst.is_finite() {
        return Err(Error::RankDeficientDesign);
    }
    let n_eff = 1.0 / (worst * worst);
    let v0 = SymmetricMatrix::from_symmetric_unchecked(v0_sq).psd_sqrt()?;
    Ok(EffectiveSampleInfo { n_eff, g_derived: model.g1 * n_eff.sqrt(), v0 })
}

/// `max_i s_i |Psi_i^T gamma| / ||V0 gamma||` for one direction.
pub fn directional_ratio(model: &DesignModel, v0_sq: &DMatrix<f64>, gamma: &DVector<f64>) -> f64 {
    let denom = gamma.dot(&(v0_sq * gamma)).sqrt();
    let num = model.psi.column_iter().zip(&model.scales).map(|(c, s)| s * c.dot(gamma).abs()).fold(0.0f64, f64::max);
    num / denom
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalRow {
    pub x: f64,
    pub threshold: f64,
    pub prob_bound: f64,
    pub regime: Regime,
    pub source: BoundSource,
}

/// Critical values of `||xi||^2` (or `||D0^-1 zeta||^2` when `D0` is given)
/// at each `x`, under the profile `(nu0, g1 sqrt(N))`.
pub fn wilks_critical_values(
    model: &DesignModel,
    d0: Option<&SymmetricMatrix>,
    x_grid: &[f64],
) -> Result<Vec<CriticalRow>> {
    if x_grid.is_empty() {
        return Err(Error::BadArgs("x grid is empty".into()));
    }
    let info = effective_sample_size(model)?;
    let profile = MomentProfile::new(model.nu0, info.g_derived)?;
    let p = model.dim();
    x_grid
        .iter()
        .map(|&x| {
            let b = match d0 {
                None => l2_quantile(&profile, p, x),
                Some(d0) => rescaled_bound(&info.v0, d0, &profile, x),
            }
            .map_err(|e| match e {
                Error::GTooSmall { condition, required, .. } => Error::SampleTooSmall {
                    n_eff: info.n_eff,
                    required_n_eff: required / (model.nu0 * model.nu0 * model.g1 * model.g1),
                    reason: format!("{condition} with g = nu0 g1 sqrt(N) after the nu0 reduction"),
                },
                other => other,
            })?;
            Ok(CriticalRow { x, threshold: b.threshold, prob_bound: b.prob_bound, regime: b.regime, source: b.source })
        })
        .collect()
}

fn parse_row(rec: &csv::StringRecord) -> Option<Vec<f64>> {
    rec.iter().map(|c| c.parse::<f64>().ok()).collect()
}

/// Reads `n` rows of `p + 1` columns (`Psi_i^T` then `s_i`). A first row that
/// does not parse as numbers is treated as a header and skipped.
pub fn read_design_csv<R: Read>(reader: R) -> Result<(DMatrix<f64>, Vec<f64>)> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.iter().all(str::is_empty) {
            continue;
        }
        match parse_row(&rec) {
            Some(r) => rows.push(r),
            None if i == 0 => continue,
            None => return Err(Error::Parse(format!("row {} is not numeric", i + 1))),
        }
    }
    let width = rows.first().map(Vec::len).ok_or_else(|| Error::Parse("design file has no rows".into()))?;
    if width < 2 {
        return Err(Error::Parse("design rows need at least two columns".into()));
    }
    if let Some(i) = rows.iter().position(|r| r.len() != width) {
        return Err(Error::Parse(format!("row {} has {} columns, expected {width}", i + 1, rows[i].len())));
    }
    let p = width - 1;
    let psi = DMatrix::from_fn(p, rows.len(), |r, c| rows[c][r]);
    let scales = rows.iter().map(|r| r[p]).collect();
    Ok((psi, scales))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{critical_quantities_l2, gaussian_quantile};
    use crate::mc::random_orthogonal;
    use crate::mc::rng::substream;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn model(psi: DMatrix<f64>, scales: Vec<f64>) -> DesignModel {
        DesignModel::new(psi, scales, 1.0, 1.0).unwrap()
    }

    fn repeated_identity(p: usize, copies: usize) -> DesignModel {
        let n = p * copies;
        model(DMatrix::from_fn(p, n, |r, c| if c % p == r { 1.0 } else { 0.0 }), vec![1.0; n])
    }

    /// Random search followed by an adaptive random walk; never uses the
    /// closed form.
    fn brute_force_sup(m: &DesignModel, n_dirs: usize, seed: u64) -> f64 {
        let v0_sq = m.v0_sq();
        let p = m.dim();
        let mut rng = substream(seed, 0);
        let gauss =
            |rng: &mut rand_chacha::ChaCha8Rng| DVector::from_fn(p, |_, _| rng.sample::<f64, _>(StandardNormal));
        let mut best = gauss(&mut rng);
        let mut best_val = directional_ratio(m, &v0_sq, &best);
        for _ in 0..n_dirs {
            let g = gauss(&mut rng);
            let v = directional_ratio(m, &v0_sq, &g);
            if v > best_val {
                best = g;
                best_val = v;
            }
        }
        let mut step = 0.3;
        for _ in 0..20_000 {
            let cand = &best / best.norm() + gauss(&mut rng) * step;
            let v = directional_ratio(m, &v0_sq, &cand);
            if v > best_val {
                best = cand;
                best_val = v;
            } else {
                step = (step * 0.999).max(1e-6);
            }
        }
        best_val
    }

    #[test]
    fn constant_design_gives_sample_size() {
        for m_obs in [1usize, 7, 250] {
            let info = effective_sample_size(&model(DMatrix::from_element(1, m_obs, 1.0), vec![1.0; m_obs])).unwrap();
            assert_relative_eq!(info.n_eff, m_obs as f64, max_relative = 1e-12);
            assert_relative_eq!(info.g_derived, (m_obs as f64).sqrt(), max_relative = 1e-12);
            assert_relative_eq!(info.v0.as_matrix()[(0, 0)], (m_obs as f64).sqrt(), max_relative = 1e-12);
        }
    }

    #[test]
    fn orthonormal_design_matches_brute_force() {
        let m = repeated_identity(3, 40);
        let info = effective_sample_size(&m).unwrap();
        assert_relative_eq!(info.n_eff, 40.0, max_relative = 1e-12);
        let bf = brute_force_sup(&m, 10_000, 1);
        assert_relative_eq!(bf, 1.0 / info.n_eff.sqrt(), max_relative = 5e-3);
    }

    #[test]
    fn duplicated_dominant_column_lowers_n() {
        let mut rng = substream(5, 0);
        let base = DMatrix::from_fn(3, 60, |_, _| rng.sample::<f64, _>(StandardNormal));
        let n_base = effective_sample_size(&model(base.clone(), vec![1.0; 60])).unwrap().n_eff;
        let dominant = base.column(0) * 6.0;
        let mut dup = base.clone().insert_columns(60, 2, 0.0);
        dup.set_column(60, &dominant);
        dup.set_column(61, &dominant);
        let n_dup = effective_sample_size(&model(dup.clone(), vec![1.0; 62])).unwrap().n_eff;
        assert!(n_dup < n_base);
        let bf = brute_force_sup(&model(dup, vec![1.0; 62]), 10_000, 2);
        assert_relative_eq!(bf, 1.0 / n_dup.sqrt(), max_relative = 5e-3);
    }

    #[test]
    fn brute_force_on_random_designs() {
        for (k, &(p, n)) in [(1usize, 10usize), (2, 30), (4, 80), (7, 150), (10, 200)].iter().enumerate() {
            let mut rng = substream(100 + k as u64, 0);
            let psi = DMatrix::from_fn(p, n, |_, _| rng.sample::<f64, _>(StandardNormal));
            let scales: Vec<f64> = (0..n).map(|_| 0.5 + rng.random::<f64>()).collect();
            let m = model(psi, scales);
            let closed = 1.0 / effective_sample_size(&m).unwrap().n_eff.sqrt();
            let bf = brute_force_sup(&m, 100_000, 7 + k as u64);
            assert!(bf <= closed * (1.0 + 1e-12));
            assert!(bf >= closed * (1.0 - 5e-3), "p={p} n={n} bf={bf} closed={closed}");
        }
    }

    #[test]
    fn rank_deficient() {
        let psi = DMatrix::from_row_slice(2, 3, &[1.0, 2.0, 3.0, 2.0, 4.0, 6.0]);
        assert_eq!(effective_sample_size(&model(psi, vec![1.0; 3])), Err(Error::RankDeficientDesign));
    }

    #[test]
    fn wilks_examples() {
        let m = repeated_identity(5, 1000);
        let info = effective_sample_size(&m).unwrap();
        assert_relative_eq!(info.n_eff, 1000.0, max_relative = 1e-12);
        let rows = wilks_critical_values(&m, None, &[2.0]).unwrap();
        assert_relative_eq!(rows[0].threshold, 18.2, max_relative = 1e-12);
        assert_eq!(rows[0].regime, Regime::SubExponential);

        let gauss = DesignModel { g1: f64::INFINITY, ..repeated_identity(5, 10) };
        let rows = wilks_critical_values(&gauss, None, &[0.5, 1.0, 4.0]).unwrap();
        for r in rows {
            assert_eq!(r.threshold, gaussian_quantile(5, r.x).unwrap().threshold);
        }

        let m = repeated_identity(5, 8);
        let g = effective_sample_size(&m).unwrap().g_derived;
        let x_c = critical_quantities_l2(g, 5).unwrap().x_c;
        let rows = wilks_critical_values(&m, None, &[x_c + 1.0]).unwrap();
        assert_eq!(rows[0].regime, Regime::LargeDeviation);
    }

    #[test]
    fn wilks_reports_required_n() {
        let m = DesignModel { nu0: 2.0, ..repeated_identity(5, 1) };
        match wilks_critical_values(&m, None, &[1.0]) {
            Err(Error::SampleTooSmall { n_eff, required_n_eff, .. }) => {
                assert_relative_eq!(n_eff, 1.0, max_relative = 1e-12);
                assert_relative_eq!(required_n_eff, 1.25, max_relative = 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn wilks_with_d0() {
        let m = repeated_identity(3, 100);
        let info = effective_sample_size(&m).unwrap();
        let same = wilks_critical_values(&m, Some(&info.v0), &[1.0]).unwrap();
        assert_eq!(same[0].source, BoundSource::Rescaled);
        let d0 = info.v0.scaled(2.0);
        let wide = wilks_critical_values(&m, Some(&d0), &[1.0]).unwrap();
        assert_relative_eq!(wide[0].threshold, same[0].threshold / 4.0, max_relative = 1e-10);
    }

    #[test]
    fn csv_header_autodetect() {
        let plain = "1,0,1\n0,1,1\n1,1,2\n";
        let header = "psi1,psi2,scale\n1,0,1\n0,1,1\n1,1,2\n";
        let a = read_design_csv(plain.as_bytes()).unwrap();
        let b = read_design_csv(header.as_bytes()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.0.shape(), (2, 3));
        assert_eq!(a.1, vec![1.0, 1.0, 2.0]);
        assert!(read_design_csv("1,2\n3,x\n".as_bytes()).is_err());
        assert!(read_design_csv("1,2\n3\n".as_bytes()).is_err());
    }

    proptest! {
        #[test]
        fn permutation_and_rotation_invariance(seed in 0u64..1000, p in 1usize..5, extra in 0usize..20) {
            let n = p + 2 + extra;
            let mut rng = substream(seed, 1);
            let psi = DMatrix::from_fn(p, n, |_, _| rng.sample::<f64, _>(StandardNormal));
            let scales: Vec<f64> = (0..n).map(|_| 0.2 + rng.random::<f64>()).collect();
            let base = effective_sample_size(&model(psi.clone(), scales.clone())).unwrap().n_eff;

            let perm: Vec<usize> = (0..n).rev().collect();
            let psi_p = DMatrix::from_fn(p, n, |r, c| psi[(r, perm[c])]);
            let scales_p: Vec<f64> = perm.iter().map(|&i| scales[i]).collect();
            let permuted = effective_sample_size(&model(psi_p, scales_p)).unwrap().n_eff;
            prop_assert!((permuted - base).abs() <= 1e-9 * base);

            let q = random_orthogonal(p, &mut rng);
            let rotated = effective_sample_size(&model(&q * &psi, scales)).unwrap().n_eff;
            prop_assert!((rotated - base).abs() <= 1e-9 * base);
        }

        #[test]
        fn critical_values_monotone(copies in 20usize..200, more in 1usize..200, x in 0.05f64..3.0, dx in 0.0f64..3.0) {
            let p = 4usize;
            let small = repeated_identity(p, copies);
            let large = repeated_identity(p, copies + more);
            let a = wilks_critical_values(&small, None, &[x, x + dx]).unwrap();
            prop_assert!(a[1].threshold >= a[0].threshold * (1.0 - 1e-12));
            // larger N never raises a threshold inside the sub-Gaussian zone
            if a[0].regime == Regime::SubGaussian {
                let b = wilks_critical_values(&large, None, &[x]).unwrap();
                prop_assert!(b[0].threshold <= a[0].threshold * (1.0 + 1e-12));
            }
        }
    }
}
