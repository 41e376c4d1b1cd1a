use serde::Serialize;

/// Which zone of the deviation picture a threshold falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Threshold grows like `sqrt(x)`: chi-square-like behavior.
    SubGaussian,
    /// Threshold grows linearly in `x`.
    SubExponential,
    /// Beyond the critical frontier, governed by the slicing bound.
    LargeDeviation,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::SubGaussian => "sub_gaussian",
            Regime::SubExponential => "sub_exponential",
            Regime::LargeDeviation => "large_deviation",
        }
    }
}

/// The result a bound was derived from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundSource {
    /// Chi-square tail of a standard normal vector.
    GaussianNorm,
    /// Gaussian quadratic form `||B xi||^2`.
    GaussianQuadForm,
    /// Moderate/sub-exponential quantile of `||xi||^2` under the moment condition.
    L2Quantile,
    /// Slicing bound on `||xi||` beyond the critical radius.
    L2LargeDeviation,
    /// Quantile of `||B xi||^2` under the moment condition.
    QuadFormQuantile,
    /// Slicing bound on `||B xi||` beyond the critical radius.
    QuadFormLargeDeviation,
    /// Quadratic-form quantile for `||D0^-1 zeta||^2` with `B^2 = D0^-1 V0^2 D0^-1`.
    Rescaled,
    /// Joint bound on `||xi||^2` under an alternative-norm constraint.
    NormConstrained,
    /// Joint bound on `||Pi xi||^2` for a sub-projector.
    SubProjector,
    /// Projected norm of a vector with Bernstein-type coordinates.
    Bernstein,
    /// The older Bernstein projected-norm bound used for comparison.
    Baraud,
}

impl BoundSource {
    pub fn as_str(&self) -> &'static str {
        match self {
            BoundSource::GaussianNorm => "gaussian_norm",
            BoundSource::GaussianQuadForm => "gaussian_quad_form",
            BoundSource::L2Quantile => "l2_quantile",
            BoundSource::L2LargeDeviation => "l2_large_deviation",
            BoundSource::QuadFormQuantile => "quad_form_quantile",
            BoundSource::QuadFormLargeDeviation => "quad_form_large_deviation",
            BoundSource::Rescaled => "rescaled",
            BoundSource::NormConstrained => "norm_constrained",
            BoundSource::SubProjector => "sub_projector",
            BoundSource::Bernstein => "bernstein",
            BoundSource::Baraud => "baraud",
        }
    }
}

/// Whether a threshold applies to the norm or to its square.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdKind {
    SquaredNorm,
    Norm,
}

/// An evaluated bound `P(statistic > threshold) <= prob_bound`.
///
/// `prob_bound` is the raw formula value and may exceed one; use
/// [`TailBound::clamped_prob`] for presentation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailBound {
    pub threshold: f64,
    pub threshold_kind: ThresholdKind,
    pub prob_bound: f64,
    pub regime: Regime,
    pub source: BoundSource,
}

impl TailBound {
    pub fn clamped_prob(&self) -> f64 {
        self.prob_bound.min(1.0)
    }

    /// The threshold expressed on the squared norm.
    pub fn squared_threshold(&self) -> f64 {
        match self.threshold_kind {
            ThresholdKind::SquaredNorm => self.threshold,
            ThresholdKind::Norm => self.threshold * self.threshold,
        }
    }
}

/// The regime frontier: root `w_c`, moment parameter `mu_c`, critical radius
/// `y_c`, critical level `x_c` and slope `g_c`.
///
/// `mu_c` is the parameter entering `x_c`; for quadratic forms it is capped
/// at 2/3. `mu_ld = w_c^2 / (1 + w_c^2)` is the uncapped value that anchors
/// the large-deviation slope, so `g_c = g - sqrt(mu_ld p) = g w_c / (1 + w_c)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalQuantities {
    pub w0: f64,
    pub w_c: f64,
    pub mu_c: f64,
    pub mu_ld: f64,
    pub y_c: f64,
    pub x_c: f64,
    pub g_c: f64,
}
