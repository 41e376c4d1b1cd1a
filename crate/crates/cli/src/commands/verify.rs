use std::path::PathBuf;

use clap::{Args, ValueEnum};
use qft_core::linalg::{quadform_spec, spectrum_of_square};
use qft_core::mc::grid::{STANDARD_P, STANDARD_X};
use qft_core::mc::{estimate_tail, random_projector, Statistic, TailQuery};
use qft_core::{
    bernstein_quantile, bform_quantile, gaussian_quantile, l2_quantile, BernsteinProfile, McCertificate, MomentProfile,
    NoiseKind, NoiseModel, TailBound, Verdict,
};
use serde::Serialize;
use serde_json::json;

use super::{base_config, default_sym_tol, read_matrix, require_list, CliError, Outcome};
use crate::output::{Cell, Table};
use crate::Format;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Gaussian,
    Rademacher,
    #[value(name = "centered-exp")]
    CenteredExp,
}

impl ModelArg {
    fn kind(self) -> NoiseKind {
        match self {
            ModelArg::Gaussian => NoiseKind::Gaussian,
            ModelArg::Rademacher => NoiseKind::Rademacher,
            ModelArg::CenteredExp => NoiseKind::CenteredExponential,
        }
    }
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Noise model.
    #[arg(long, value_enum, default_value_t = ModelArg::Gaussian)]
    pub model: ModelArg,

    /// Dimension p.
    #[arg(long)]
    pub p: Option<usize>,

    /// Symmetric matrix B (headerless CSV); certifies the quadratic-form bound.
    #[arg(long, conflicts_with = "p")]
    pub matrix: Option<PathBuf>,

    /// Deviation levels x, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub x: Vec<f64>,

    /// Moment radius g used for the bound (the Gaussian and Rademacher models allow inf).
    #[arg(long, default_value_t = f64::INFINITY)]
    pub g: f64,

    /// Monte Carlo sample size per certificate.
    #[arg(long, default_value_t = 100_000)]
    pub n: usize,

    /// Confidence level of the Clopper-Pearson interval.
    #[arg(long, default_value_t = 0.99)]
    pub conf: f64,

    /// Run the standard Gaussian grid p in {2, 5, 10, 50}, x in {0.5, 1, 2, 4}.
    #[arg(long, conflicts_with_all = ["p", "matrix", "x", "bernstein"])]
    pub grid: bool,

    /// Certify the Bernstein-condition bound on a random subspace (centered-exp model).
    #[arg(long, conflicts_with_all = ["p", "matrix"])]
    pub bernstein: bool,

    /// Subspace dimension for --bernstein.
    #[arg(long, default_value_t = 10)]
    pub pbar: usize,

    /// Ambient dimension for --bernstein.
    #[arg(long, default_value_t = 20)]
    pub ambient: usize,

    /// Bernstein sigma.
    #[arg(long, default_value_t = 4.0)]
    pub sigma: f64,

    /// Bernstein scale c.
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,

    /// Sup-norm constraint level u_s for --bernstein.
    #[arg(long, default_value_t = 1.0)]
    pub us: f64,

    /// Relative symmetry tolerance for matrix files.
    #[arg(long, default_value_t = default_sym_tol())]
    pub sym_tol: f64,
}

#[derive(Debug, Clone, Serialize)]
struct Case {
    model: &'static str,
    statistic: &'static str,
    p: usize,
    x: f64,
    threshold: f64,
    bound_source: &'static str,
}

struct Job {
    case: Case,
    model: NoiseModel,
    query: TailQuery,
}

fn job(model: NoiseModel, statistic: &'static str, x: f64, b: &TailBound, query: TailQuery) -> Job {
    Job {
        case: Case {
            model: model.kind.as_str(),
            statistic,
            p: model.dim,
            x,
            threshold: b.threshold,
            bound_source: b.source.as_str(),
        },
        model,
        query,
    }
}

pub fn run(a: &VerifyArgs, format: Option<Format>, seed: u64) -> Result<Outcome, CliError> {
    if !(a.conf > 0.0 && a.conf < 1.0) {
        return Err(CliError::Config(format!("--conf must lie in (0, 1), got {}", a.conf)));
    }
    let mut config = base_config("verify", format, Format::Json, seed);
    config.push("model", a.model.kind().as_str()).push("n", a.n).push("conf", a.conf);
    let jobs = if a.grid {
        grid_jobs(a, seed, &mut config)?
    } else if a.bernstein {
        bernstein_jobs(a, seed, &mut config)?
    } else {
        plain_jobs(a, seed, &mut config)?
    };

    let mut results = Vec::with_capacity(jobs.len());
    for j in jobs {
        let cert = estimate_tail(&j.model, &j.query)?;
        results.push((j.case, cert));
    }
    let count = |v: Verdict| results.iter().filter(|(_, c)| c.verdict == v).count();
    let (certified, inconclusive, violated) =
        (count(Verdict::Certified), count(Verdict::Inconclusive), count(Verdict::Violated));

    let text = match format.unwrap_or(Format::Json) {
        Format::Json => {
            let mut lines = Vec::with_capacity(results.len() + 2);
            let mut head = config.json();
            head["type"] = json!("config");
            lines.push(head.to_string());
            for (case, cert) in &results {
                lines.push(json!({"type": "certificate", "case": case, "certificate": cert}).to_string());
            }
            lines.push(
                json!({
                    "type": "summary",
                    "total": results.len(),
                    "certified": certified,
                    "inconclusive": inconclusive,
                    "violated": violated,
                })
                .to_string(),
            );
            lines.join("\n") + "\n"
        }
        Format::Csv => {
            let mut t = Table::new(
                config,
                vec![
                    "model",
                    "statistic",
                    "p",
                    "x",
                    "threshold",
                    "bound_source",
                    "n_samples",
                    "n_exceed",
                    "point_estimate",
                    "lower_conf",
                    "upper_conf",
                    "conf_level",
                    "theoretical_bound",
                    "verdict",
                ],
            );
            for (case, c) in &results {
                t.push(certificate_row(case, c));
            }
            t.note("certified", certified);
            t.note("inconclusive", inconclusive);
            t.note("violated", violated);
            t.to_csv()
        }
    };
    Ok(Outcome { text, violated: violated > 0 })
}

fn certificate_row(case: &Case, c: &McCertificate) -> Vec<Cell> {
    let verdict = match c.verdict {
        Verdict::Certified => "certified",
        Verdict::Inconclusive => "inconclusive",
        Verdict::Violated => "violated",
    };
    vec![
        case.model.into(),
        case.statistic.into(),
        case.p.into(),
        case.x.into(),
        case.threshold.into(),
        case.bound_source.into(),
        c.n_samples.into(),
        c.n_exceed.into(),
        c.point_estimate.into(),
        c.lower_conf.into(),
        c.upper_conf.into(),
        c.conf_level.into(),
        c.theoretical_bound.into(),
        verdict.into(),
    ]
}

fn grid_jobs(a: &VerifyArgs, seed: u64, config: &mut crate::output::Config) -> Result<Vec<Job>, CliError> {
    if a.model != ModelArg::Gaussian {
        return Err(CliError::Config("--grid runs the Gaussian model only".into()));
    }
    config.push("mode", "gaussian_grid");
    config.list("p", &STANDARD_P.map(|p| p as f64));
    config.list("x", &STANDARD_X);
    let mut jobs = Vec::new();
    for p in STANDARD_P {
        let model = NoiseModel::new(NoiseKind::Gaussian, p, seed);
        for x in STANDARD_X {
            let b = gaussian_quantile(p, x)?;
            jobs.push(job(model, "l2_sq", x, &b, TailQuery::l2(b.threshold, a.n, a.conf, b.prob_bound)));
        }
    }
    Ok(jobs)
}

fn plain_jobs(a: &VerifyArgs, seed: u64, config: &mut crate::output::Config) -> Result<Vec<Job>, CliError> {
    if a.model == ModelArg::CenteredExp {
        return Err(CliError::Config("the centered-exp model has no sub-Gaussian profile; use --bernstein".into()));
    }
    require_list("x", &a.x)?;
    let profile = MomentProfile::standard(a.g)?;
    config.push("g", a.g);
    let mut jobs = Vec::new();
    if let Some(path) = &a.matrix {
        let b = read_matrix(path, a.sym_tol)?;
        let spec = quadform_spec(&spectrum_of_square(&b)?)?;
        config.push("mode", "bform").push("matrix", path.display().to_string()).list("x", &a.x);
        let model = NoiseModel::new(a.model.kind(), b.dim(), seed);
        for &x in &a.x {
            let bound = bform_quantile(&profile, &spec, x)?;
            let query = TailQuery {
                statistic: Statistic::ProjectedSq,
                projector: Some(b.as_matrix().clone()),
                ..TailQuery::l2(bound.threshold, a.n, a.conf, bound.prob_bound)
            };
            jobs.push(job(model, "bform_sq", x, &bound, query));
        }
    } else {
        let p =
            a.p.ok_or_else(|| CliError::Config("one of --p, --matrix, --grid or --bernstein is required".into()))?;
        config.push("mode", "l2").push("p", p).list("x", &a.x);
        let model = NoiseModel::new(a.model.kind(), p, seed);
        for &x in &a.x {
            let bound = l2_quantile(&profile, p, x)?;
            jobs.push(job(model, "l2_sq", x, &bound, TailQuery::l2(bound.threshold, a.n, a.conf, bound.prob_bound)));
        }
    }
    Ok(jobs)
}

fn bernstein_jobs(a: &VerifyArgs, seed: u64, config: &mut crate::output::Config) -> Result<Vec<Job>, CliError> {
    if a.model != ModelArg::CenteredExp {
        return Err(CliError::Config("--bernstein needs --model centered-exp".into()));
    }
    require_list("x", &a.x)?;
    let profile = BernsteinProfile::new(a.sigma, a.c, a.ambient, a.pbar)?;
    let constraint = profile.constraint(a.us)?;
    let model = NoiseModel::new(NoiseKind::CenteredExponential, a.ambient, seed);
    let projector = random_projector(a.ambient, a.pbar, &mut model.aux_rng())?;
    let cap = 2.0 * a.sigma * a.us;
    config
        .push("mode", "bernstein")
        .push("pbar", a.pbar)
        .push("ambient", a.ambient)
        .push("sigma", a.sigma)
        .push("c", a.c)
        .push("u_s", a.us)
        .push("g_s", profile.g_s())
        .push("r_star", constraint.r_star)
        .push("sup_cap", cap)
        .list("x", &a.x);
    let mut jobs = Vec::new();
    for &x in &a.x {
        let b = bernstein_quantile(&profile, a.us, x)?.unscaled;
        let query = TailQuery {
            statistic: Statistic::ProjectedSq,
            projector: Some(projector.clone()),
            sup_cap: Some(cap),
            ..TailQuery::l2(b.threshold, a.n, a.conf, b.prob_bound)
        };
        let mut j = job(model, "projected_sq", x, &b, query);
        j.case.p = a.pbar;
        jobs.push(j);
    }
    Ok(jobs)
}
