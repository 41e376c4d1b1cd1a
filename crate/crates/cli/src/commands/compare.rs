use clap::Args;
use qft_core::{baraud_quantile, bernstein_quantile, BernsteinProfile};

use super::{base_config, require_list, CliError, Outcome};
use crate::output::Table;
use crate::Format;

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Bernstein sigma.
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,

    /// Bernstein scale c.
    #[arg(long, default_value_t = 0.05)]
    pub c: f64,

    /// Subspace dimension.
    #[arg(long, default_value_t = 10)]
    pub pbar: usize,

    /// Ambient dimension (sets r* = sqrt(2 log n)).
    #[arg(long, default_value_t = 100)]
    pub ambient: usize,

    /// Sup-norm constraint level u_s.
    #[arg(long, default_value_t = 2.0)]
    pub us: f64,

    /// Level u inside sqrt(6 c u) of the Baraud bound (default 2 sigma u_s).
    #[arg(long)]
    pub u_level: Option<f64>,

    /// Deviation levels x, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub x: Vec<f64>,
}

pub fn run(a: &CompareArgs, format: Option<Format>, seed: u64) -> Result<Outcome, CliError> {
    require_list("x", &a.x)?;
    let profile = BernsteinProfile::new(a.sigma, a.c, a.ambient, a.pbar)?;
    let u_level = a.u_level.unwrap_or(2.0 * a.sigma * a.us);
    let mut config = base_config("compare", format, Format::Csv, seed);
    config
        .push("sigma", a.sigma)
        .push("c", a.c)
        .push("pbar", a.pbar)
        .push("ambient", a.ambient)
        .push("u_s", a.us)
        .push("u_level", u_level)
        .push("g_s", profile.g_s())
        .list("x", &a.x);
    let mut t = Table::new(
        config,
        vec!["x", "bernstein_sq", "bernstein_prob", "baraud_sq", "baraud_prob", "ratio", "baraud_branch"],
    );
    for &x in &a.x {
        let ours = bernstein_quantile(&profile, a.us, x)?.unscaled;
        let theirs = baraud_quantile(&profile, u_level, x)?;
        let branch = if 3.0 * a.sigma >= (6.0 * a.c * u_level).sqrt() { "3sigma" } else { "sqrt_6cu" };
        t.push(vec![
            x.into(),
            ours.threshold.into(),
            ours.prob_bound.into(),
            theirs.squared_threshold().into(),
            theirs.prob_bound.into(),
            (theirs.squared_threshold() / ours.threshold).into(),
            branch.into(),
        ]);
    }
    Ok(Outcome::table(&t, format))
}
