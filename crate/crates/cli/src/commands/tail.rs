use std::path::PathBuf;

use clap::Args;
use qft_core::constrained::constrained_tail_slope_form;
use qft_core::linalg::{quadform_spec, spectrum_of_square};
use qft_core::{
    bform_large_dev_tail, constrained_tail, l2_large_dev_tail, solve_z_s, LargeDeviationTail, MomentProfile,
    NormConstraint, NormKind,
};

use super::{base_config, default_sym_tol, read_matrix, require_list, CliError, Outcome};
use crate::output::{Cell, Table};
use crate::Format;

#[derive(Debug, Args)]
pub struct TailArgs {
    /// Dimension p.
    #[arg(long, conflicts_with = "matrix")]
    pub p: Option<usize>,

    /// Symmetric matrix B (headerless CSV).
    #[arg(long)]
    pub matrix: Option<PathBuf>,

    /// Moment radius g.
    #[arg(long)]
    pub g: Option<f64>,

    /// Variance factor nu0 >= 1.
    #[arg(long, default_value_t = 1.0)]
    pub nu0: f64,

    /// Norm levels y for the large-deviation tail, comma separated.
    #[arg(long, value_delimiter = ',', conflicts_with = "z")]
    pub y: Vec<f64>,

    /// Slicing parameter mu0 in (0, 1) for the l2 tail (defaults to the critical one).
    #[arg(long)]
    pub mu0: Option<f64>,

    /// Radius g_s in the constraint norm; switches to the norm-constrained tail.
    #[arg(long, requires = "us")]
    pub gs: Option<f64>,

    /// Gaussian median radius r* of the constraint norm.
    #[arg(long, conflicts_with = "sup_dim")]
    pub r_star: Option<f64>,

    /// Use the sup-norm in this dimension, r* = sqrt(2 log m).
    #[arg(long)]
    pub sup_dim: Option<usize>,

    /// Constraint level u_s.
    #[arg(long)]
    pub us: Option<f64>,

    /// Squared-norm levels z for the constrained tail, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub z: Vec<f64>,

    /// Relative symmetry tolerance for matrix files.
    #[arg(long, default_value_t = default_sym_tol())]
    pub sym_tol: f64,
}

pub fn run(a: &TailArgs, format: Option<Format>, seed: u64) -> Result<Outcome, CliError> {
    if let Some(g_s) = a.gs {
        return constrained(a, g_s, format, seed);
    }
    require_list("y", &a.y)?;
    let g = a.g.ok_or_else(|| CliError::Config("--g is required for the large-deviation tail".into()))?;
    let profile = MomentProfile::new(a.nu0, g)?;
    let mut config = base_config("tail", format, Format::Csv, seed);
    config.push("g", g).push("nu0", a.nu0);

    let tails: Vec<LargeDeviationTail> = if let Some(p) = a.p {
        config.push("statistic", "l2").push("p", p);
        if let Some(mu0) = a.mu0 {
            config.push("mu0", mu0);
        }
        a.y.iter().map(|&y| l2_large_dev_tail(&profile, p, y, a.mu0)).collect::<Result<_, _>>()?
    } else if let Some(path) = &a.matrix {
        if a.mu0.is_some() {
            return Err(CliError::Config("--mu0 applies to the l2 tail only".into()));
        }
        let b = read_matrix(path, a.sym_tol)?;
        let spec = quadform_spec(&spectrum_of_square(&b)?)?;
        config
            .push("statistic", "bform")
            .push("matrix", path.display().to_string())
            .push("p_eff", spec.p_eff)
            .push("lambda_star", spec.lambda_star);
        a.y.iter().map(|&y| bform_large_dev_tail(&profile, &spec, y)).collect::<Result<_, _>>()?
    } else {
        return Err(CliError::Config("one of --p or --matrix is required".into()));
    };
    config.list("y", &a.y);

    let mut t = Table::new(config, vec!["y", "sharp", "linearized", "y0", "x0", "g0", "source"]);
    for (y, tl) in a.y.iter().zip(tails) {
        t.push(vec![
            (*y).into(),
            tl.sharp.prob_bound.into(),
            tl.linearized.into(),
            tl.y0.into(),
            tl.x0.into(),
            tl.g0.into(),
            tl.sharp.source.as_str().into(),
        ]);
    }
    Ok(Outcome::table(&t, format))
}

fn constrained(a: &TailArgs, g_s: f64, format: Option<Format>, seed: u64) -> Result<Outcome, CliError> {
    require_list("z", &a.z)?;
    let p = a.p.ok_or_else(|| CliError::Config("--p is required for the constrained tail".into()))?;
    let u_s = a.us.ok_or_else(|| CliError::Config("--us is required for the constrained tail".into()))?;
    let c = match (a.r_star, a.sup_dim) {
        (Some(r), None) => NormConstraint::new(NormKind::Custom, g_s, r, u_s)?,
        (None, Some(m)) => NormConstraint::sup_norm(g_s, m, u_s)?,
        _ => return Err(CliError::Config("exactly one of --r-star or --sup-dim is required".into())),
    };
    let cr = solve_z_s(&c, p)?;
    let mut config = base_config("tail", format, Format::Csv, seed);
    config
        .push("statistic", "l2_constrained")
        .push("p", p)
        .push("g_s", c.g_s)
        .push("r_star", c.r_star)
        .push("u_s", c.u_s)
        .list("z", &a.z);
    let mut t = Table::new(config, vec!["z", "prob_bound", "regime", "slope_form", "z_s", "x_s", "mu_s"]);
    for &z in &a.z {
        let b = constrained_tail(&c, p, z)?;
        let slope = constrained_tail_slope_form(&c, p, z)?;
        t.push(vec![
            z.into(),
            b.prob_bound.into(),
            b.regime.as_str().into(),
            slope.map_or(Cell::text(""), Cell::from),
            cr.z_s.into(),
            cr.x_s.into(),
            cr.mu_s.map_or(Cell::text(""), Cell::from),
        ]);
    }
    Ok(Outcome::table(&t, format))
}
