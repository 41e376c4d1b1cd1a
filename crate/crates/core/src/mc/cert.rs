use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Certified,
    Inconclusive,
    Violated,
}

impl Verdict {
    /// `Violated` iff the lower limit exceeds the bound, `Certified` iff the
    /// upper limit does not.
    pub fn judge(lower: f64, upper: f64, bound: f64) -> Self {
        if lower > bound {
            Verdict::Violated
        } else if upper <= bound {
            Verdict::Certified
        } else {
            Verdict::Inconclusive
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McCertificate {
    pub n_samples: u64,
    pub n_exceed: u64,
    pub point_estimate: f64,
    pub upper_conf: f64,
    pub lower_conf: f64,
    pub conf_level: f64,
    pub theoretical_bound: f64,
    pub verdict: Verdict,
}

impl McCertificate {
    pub fn from_counts(n_exceed: u64, n_samples: u64, conf: f64, bound: f64) -> Result<Self> {
        let (lower_conf, upper_conf) = clopper_pearson(n_exceed, n_samples, conf)?;
        Ok(Self {
            n_samples,
            n_exceed,
            point_estimate: n_exceed as f64 / n_samples as f64,
            upper_conf,
            lower_conf,
            conf_level: conf,
            theoretical_bound: bound,
            verdict: Verdict::judge(lower_conf, upper_conf, bound),
        })
    }
}

fn beta_quantile(a: f64, b: f64, q: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if beta_reg(a, b, mid) < q {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Exact two-sided Clopper-Pearson interval for `k` successes in `n` trials.
pub fn clopper_pearson(k: u64, n: u64, conf: f64) -> Result<(f64, f64)> {
    if n == 0 || k > n {
        return Err(Error::BadArgs(format!("need 0 <= k <= n and n >= 1, got k={k}, n={n}")));
    }
    if !(conf > 0.0 && conf < 1.0) {
        return Err(Error::BadArgs(format!("conf must lie in (0, 1), got {conf}")));
    }
    let alpha = 1.0 - conf;
    let (kf, nf) = (k as f64, n as f64);
    let lower = if k == 0 { 0.0 } else { beta_quantile(kf, nf - kf + 1.0, alpha / 2.0) };
    let upper = if k == n { 1.0 } else { beta_quantile(kf + 1.0, nf - kf, 1.0 - alpha / 2.0) };
    Ok((lower, upper))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::Rng;

    #[test]
    fn reference_intervals() {
        // scipy.stats.beta.ppf oracle
        let (lo, hi) = clopper_pearson(5, 100, 0.95).unwrap();
        assert_relative_eq!(lo, 0.016431879182052155, max_relative = 1e-8);
        assert_relative_eq!(hi, 0.11283491110546275, max_relative = 1e-8);
        let (lo, hi) = clopper_pearson(0, 50, 0.99).unwrap();
        assert_eq!(lo, 0.0);
        assert_relative_eq!(hi, 1.0 - 0.005f64.powf(1.0 / 50.0), max_relative = 1e-9);
        let (lo, hi) = clopper_pearson(50, 50, 0.99).unwrap();
        assert_relative_eq!(lo, 0.005f64.powf(1.0 / 50.0), max_relative = 1e-9);
        assert_eq!(hi, 1.0);
    }

    #[test]
    fn bad_inputs() {
        assert!(clopper_pearson(3, 2, 0.9).is_err());
        assert!(clopper_pearson(0, 0, 0.9).is_err());
        assert!(clopper_pearson(1, 2, 1.0).is_err());
    }

    #[test]
    fn verdicts() {
        assert_eq!(Verdict::judge(0.1, 0.2, 0.3), Verdict::Certified);
        assert_eq!(Verdict::judge(0.1, 0.4, 0.3), Verdict::Inconclusive);
        assert_eq!(Verdict::judge(0.35, 0.4, 0.3), Verdict::Violated);
        let c = McCertificate::from_counts(10, 1000, 0.99, 0.5).unwrap();
        assert_eq!(c.verdict, Verdict::Certified);
        assert!(c.lower_conf <= c.point_estimate && c.point_estimate <= c.upper_conf);
        let json = serde_json::to_string(&c).unwrap();
        assert!(json.contains("\"verdict\":\"certified\"") && json.contains("\"n_exceed\":10"));
    }

    #[test]
    fn coverage_meta_trials() {
        let mut rng = super::super::rng::substream(2024, 0);
        let (n, rate, trials) = (500u64, 0.1, 1000);
        let covered = (0..trials)
            .filter(|_| {
                let k = (0..n).filter(|_| rng.random::<f64>() < rate).count() as u64;
                let (lo, hi) = clopper_pearson(k, n, 0.99).unwrap();
                lo <= rate && rate <= hi
            })
            .count();
        assert!(covered as f64 >= 0.99 * trials as f64, "covered {covered}");
    }
}
