use std::fs::File;
use std::path::PathBuf;

use clap::Args;
use qft_core::regression::read_design_csv;
use qft_core::{effective_sample_size, wilks_critical_values, DesignModel};

use super::{base_config, default_sym_tol, read_matrix, require_list, CliError, Outcome};
use crate::output::Table;
use crate::Format;

#[derive(Debug, Args)]
pub struct RegressionArgs {
    /// Design CSV: one row per observation, the regressors then the noise scale.
    #[arg(long)]
    pub design: PathBuf,

    /// Per-observation moment radius g1 (inf for Gaussian errors).
    #[arg(long)]
    pub g1: f64,

    /// Per-observation variance factor nu0 >= 1.
    #[arg(long, default_value_t = 1.0)]
    pub nu0: f64,

    /// Deviation levels x, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub x: Vec<f64>,

    /// Optional D0 (headerless CSV) for critical values of ||D0^-1 zeta||^2.
    #[arg(long)]
    pub d0: Option<PathBuf>,

    /// Relative symmetry tolerance for matrix files.
    #[arg(long, default_value_t = default_sym_tol())]
    pub sym_tol: f64,
}

pub fn run(a: &RegressionArgs, format: Option<Format>, seed: u64) -> Result<Outcome, CliError> {
    require_list("x", &a.x)?;
    let file =
        File::open(&a.design).map_err(|e| CliError::Config(format!("cannot open {}: {e}", a.design.display())))?;
    let (psi, scales) = read_design_csv(file).map_err(|e| CliError::Config(format!("{}: {e}", a.design.display())))?;
    let model = DesignModel::new(psi, scales, a.nu0, a.g1)?;
    let d0 = a.d0.as_ref().map(|p| read_matrix(p, a.sym_tol)).transpose()?;
    let info = effective_sample_size(&model)?;

    let mut config = base_config("regression", format, Format::Csv, seed);
    config.push("design", a.design.display().to_string()).push("g1", a.g1).push("nu0", a.nu0);
    if let Some(p) = &a.d0 {
        config.push("d0", p.display().to_string());
    }
    config.list("x", &a.x);
    let rows = wilks_critical_values(&model, d0.as_ref(), &a.x)?;
    let mut t = Table::new(config, vec!["x", "threshold", "prob_bound", "regime", "source"]);
    t.note("n_obs", model.n_obs());
    t.note("p", model.dim());
    t.note("n_eff", info.n_eff);
    t.note("g", info.g_derived);
    for r in rows {
        t.push(vec![
            r.x.into(),
            r.threshold.into(),
            r.prob_bound.into(),
            r.regime.as_str().into(),
            r.source.as_str().into(),
        ]);
    }
    Ok(Outcome::table(&t, format))
}
