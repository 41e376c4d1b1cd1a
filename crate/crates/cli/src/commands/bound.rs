use std::path::PathBuf;

use clap::Args;
use qft_core::linalg::{quadform_spec, spectrum_of_square};
use qft_core::{bform_quantile, l2_quantile, rescaled_bound, rescaled_spec, MomentProfile, TailBound};

use super::{base_config, default_sym_tol, read_matrix, require_list, CliError, Outcome};
use crate::output::Table;
use crate::Format;

#[derive(Debug, Args)]
pub struct BoundArgs {
    /// Dimension p for the squared-norm bound.
    #[arg(long, conflicts_with_all = ["matrix", "v0"])]
    pub p: Option<usize>,

    /// Symmetric matrix B (headerless CSV) for the quadratic-form bound.
    #[arg(long, conflicts_with = "v0")]
    pub matrix: Option<PathBuf>,

    /// V0 for the rescaled bound on ||D0^-1 zeta||^2 (needs --d0).
    #[arg(long, requires = "d0")]
    pub v0: Option<PathBuf>,

    /// D0 for the rescaled bound (needs --v0).
    #[arg(long, requires = "v0")]
    pub d0: Option<PathBuf>,

    /// Moment radius g (inf for Gaussian noise).
    #[arg(long, default_value_t = f64::INFINITY)]
    pub g: f64,

    /// Variance factor nu0 >= 1.
    #[arg(long, default_value_t = 1.0)]
    pub nu0: f64,

    /// Deviation levels x, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub x: Vec<f64>,

    /// Relative symmetry tolerance for matrix files.
    #[arg(long, default_value_t = default_sym_tol())]
    pub sym_tol: f64,
}

pub fn run(a: &BoundArgs, format: Option<Format>, seed: u64) -> Result<Outcome, CliError> {
    require_list("x", &a.x)?;
    let profile = MomentProfile::new(a.nu0, a.g)?;
    let mut config = base_config("bound", format, Format::Csv, seed);
    config.push("g", a.g).push("nu0", a.nu0);

    let bounds: Vec<TailBound> = if let Some(p) = a.p {
        config.push("statistic", "l2_sq").push("p", p);
        a.x.iter().map(|&x| l2_quantile(&profile, p, x)).collect::<Result<_, _>>()?
    } else if let Some(path) = &a.matrix {
        let b = read_matrix(path, a.sym_tol)?;
        let spec = quadform_spec(&spectrum_of_square(&b)?)?;
        config
            .push("statistic", "bform_sq")
            .push("matrix", path.display().to_string())
            .push("p", b.dim())
            .push("p_eff", spec.p_eff)
            .push("v_sq", spec.v_sq)
            .push("lambda_star", spec.lambda_star);
        a.x.iter().map(|&x| bform_quantile(&profile, &spec, x)).collect::<Result<_, _>>()?
    } else if let (Some(v0_path), Some(d0_path)) = (&a.v0, &a.d0) {
        let v0 = read_matrix(v0_path, a.sym_tol)?;
        let d0 = read_matrix(d0_path, a.sym_tol)?;
        let spec = rescaled_spec(&v0, &d0)?;
        config
            .push("statistic", "rescaled_sq")
            .push("v0", v0_path.display().to_string())
            .push("d0", d0_path.display().to_string())
            .push("p", v0.dim())
            .push("p_eff", spec.p_eff)
            .push("v_sq", spec.v_sq)
            .push("lambda_star", spec.lambda_star);
        a.x.iter().map(|&x| rescaled_bound(&v0, &d0, &profile, x)).collect::<Result<_, _>>()?
    } else {
        return Err(CliError::Config("one of --p, --matrix or --v0/--d0 is required".into()));
    };
    config.list("x", &a.x);

    let mut t = Table::new(config, vec!["x", "threshold", "prob_bound", "regime", "source"]);
    for (x, b) in a.x.iter().zip(bounds) {
        t.push(vec![
            (*x).into(),
            b.threshold.into(),
            b.prob_bound.into(),
            b.regime.as_str().into(),
            b.source.as_str().into(),
        ]);
    }
    Ok(Outcome::table(&t, format))
}
