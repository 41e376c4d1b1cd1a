use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the bound kernels, the Monte Carlo lab and the file readers.
///
/// Variants split into two families: bad input (shape, parse, I/O, malformed
/// arguments) and math-domain refusals (a bound's standing assumption fails).
/// See [`Error::is_domain`].
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },

    #[error("asymmetry {max_asymmetry:e} exceeds tolerance {tol:e}")]
    AsymmetryExceedsTol { max_asymmetry: f64, tol: f64 },

    #[error("non-finite entry at ({row}, {col})")]
    NonFiniteEntry { row: usize, col: usize },

    #[error("symmetric eigendecomposition did not converge")]
    EigenFailure,

    #[error("spectrum is empty")]
    EmptySpectrum,

    #[error("eigenvalue {value:e} of a PSD matrix is negative beyond roundoff")]
    NegativeEigenvalue { value: f64 },

    #[error("mu * lambda_max = {product} >= 1: the exponential moment does not exist")]
    MuTooLarge { product: f64 },

    #[error("argument must be nonnegative, got {0}")]
    NegativeArgument(f64),

    #[error("invalid argument: {0}")]
    BadArgs(String),

    #[error("value must be finite: {0}")]
    NonFinite(&'static str),

    #[error("{condition} required for the {bound} (have g^2 = {g_sq}, need >= {required})")]
    GTooSmall { bound: &'static str, condition: &'static str, g_sq: f64, required: f64 },

    #[error("y = {y} lies below the critical radius {y_crit}")]
    YBelowCritical { y: f64, y_crit: f64 },

    #[error("invalid mu0 = {mu0}: need 0 < mu0 < 1 and mu0 * p < g^2")]
    MuInvalid { mu0: f64 },

    #[error("spectrum must be normalized to lambda_max = 1, got {lambda_star}")]
    NotNormalized { lambda_star: f64 },

    #[error("matrix is zero (lambda_max = 0)")]
    ZeroMatrix,

    #[error("D0 is not positive definite")]
    D0NotPD,

    #[error("z = {z} must exceed the dimension p = {p}")]
    ZNotAbovePDim { z: f64, p: usize },

    #[error("invalid norm constraint: {0}")]
    BadConstraint(String),

    #[error("spectrum is not that of a sub-projector (largest eigenvalue {max_eigenvalue})")]
    SpectrumNotSubProjector { max_eigenvalue: f64 },

    #[error("assumption violated: {0}")]
    AssumptionViolated(String),

    #[error("dimension m = {0} too small (need m >= 2)")]
    DimTooSmall(usize),

    #[error("statistic needs a matrix but none was supplied")]
    SpecMissing,

    #[error("design is rank deficient: V0^2 is not positive definite")]
    RankDeficientDesign,

    #[error("effective sample size N = {n_eff} is too small: need N >= {required_n_eff} ({reason})")]
    SampleTooSmall { n_eff: f64, required_n_eff: f64, reason: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// True for refusals that come from the mathematics (a bound's
    /// precondition fails) rather than from malformed input.
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            Error::EigenFailure
                | Error::MuTooLarge { .. }
                | Error::GTooSmall { .. }
                | Error::YBelowCritical { .. }
                | Error::MuInvalid { .. }
                | Error::NotNormalized { .. }
                | Error::ZeroMatrix
                | Error::D0NotPD
                | Error::ZNotAbovePDim { .. }
                | Error::SpectrumNotSubProjector { .. }
                | Error::AssumptionViolated(_)
                | Error::RankDeficientDesign
                | Error::SampleTooSmall { .. }
                | Error::NegativeEigenvalue { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
