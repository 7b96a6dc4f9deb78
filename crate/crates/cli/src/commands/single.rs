//! Commands on one observed pair.

use std::path::PathBuf;

use clap::Args;
use pairhmm::dp::{self, Criterion, DpWorkspace, ViterbiConfig};
use pairhmm::inference::{linspace, log_criterion, mle as fit, posterior_grid, Observation, OptimizerConfig};
use pairhmm::io::{fmt_float, write_estimates_csv, write_path, EstimateRow};
use pairhmm::model::ParamName;
use serde::Serialize;

use super::{base_dir, load_model, manifest_beside, parse_assignment, PairInput};
use crate::error::{CliError, CliResult};
use crate::manifest::Run;

pub(super) fn table(header: &[&str], rows: &[Vec<String>]) -> CliResult<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Usage(e.to_string());
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    w.into_inner().map_err(|e| CliError::Usage(e.to_string()))
}

fn write_with_manifest<C: Serialize>(command: &str, args: &C, out: &PathBuf, bytes: &[u8], evaluations: u64) -> CliResult<()> {
    let mut run = Run::new(command, args, &base_dir(out))?;
    run.evaluations = evaluations;
    run.write(out, bytes)?;
    run.finish(&manifest_beside(out))?;
    Ok(())
}

#[derive(Args, Debug, Serialize)]
pub struct LoglikArgs {
    /// Model file.
    #[arg(long)]
    pub model: PathBuf,
    #[command(flatten)]
    pub input: PairInput,
    /// q, fixed-t or marginal.
    #[arg(long, default_value = "q")]
    pub criterion: Criterion,
    /// Alignment length; required by fixed-t.
    #[arg(long)]
    pub t: Option<usize>,
    /// Also write a one-row CSV here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn loglik(a: &LoglikArgs) -> CliResult<()> {
    let scheme = load_model(&a.model)?;
    let theta = scheme.theta::<f64>()?;
    let (x, y) = a.input.load(theta.alphabet())?;
    if a.criterion == Criterion::FixedT && a.t.is_none() {
        return Err(CliError::Usage("--criterion fixed-t needs --t".into()));
    }
    let obs = Observation::new(x, y, a.t);
    let value = log_criterion(&mut DpWorkspace::new(), &theta, &obs, a.criterion)?;
    println!("{}", fmt_float(value));
    if let Some(out) = &a.out {
        let row = vec![
            a.criterion.to_string(),
            obs.x.len().to_string(),
            obs.y.len().to_string(),
            a.t.map(|t| t.to_string()).unwrap_or_default(),
            fmt_float(value),
        ];
        let bytes = table(&["criterion", "n", "m", "t", "value"], &[row])?;
        write_with_manifest("loglik", a, out, &bytes, 1)?;
    }
    Ok(())
}

#[derive(Args, Debug, Serialize)]
pub struct ViterbiArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[command(flatten)]
    pub input: PairInput,
    /// Largest traceback table, in cells.
    #[arg(long, default_value_t = ViterbiConfig::default().traceback_cap)]
    pub cap: u128,
    /// Write the path (one line over H, V, D) here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn viterbi(a: &ViterbiArgs) -> CliResult<()> {
    let theta = load_model(&a.model)?.theta::<f64>()?;
    let (x, y) = a.input.load(theta.alphabet())?;
    let cfg = ViterbiConfig { traceback_cap: a.cap };
    let r = dp::viterbi_with(&theta, &x, &y, &cfg)?;
    let mut text = Vec::new();
    write_path(&mut text, &r.path).expect("write to memory");
    print!("{}", String::from_utf8_lossy(&text));
    println!("log_prob {}", fmt_float(r.log_prob));
    if let Some(out) = &a.out {
        write_with_manifest("viterbi", a, out, &text, 1)?;
    }
    Ok(())
}

#[derive(Args, Debug, Serialize)]
pub struct MleArgs {
    /// Model file with a [scheme] section; supplies the non-free values.
    #[arg(long)]
    pub model: PathBuf,
    #[command(flatten)]
    pub input: PairInput,
    /// Coordinates to estimate, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub free: Vec<ParamName>,
    /// Pin a coordinate: name=value (repeatable).
    #[arg(long = "fix", value_parser = parse_assignment)]
    pub fixed: Vec<(ParamName, f64)>,
    /// Known alignment length; the criterion is divided by it (else by max(n, m)).
    #[arg(long)]
    pub t: Option<usize>,
    #[arg(long, default_value = "q")]
    pub criterion: Criterion,
    #[arg(long, default_value_t = OptimizerConfig::default().multistart)]
    pub multistart: usize,
    #[arg(long, default_value_t = OptimizerConfig::default().max_evaluations)]
    pub max_evaluations: usize,
    #[arg(long, default_value_t = OptimizerConfig::default().tolerance)]
    pub tolerance: f64,
    /// Extra simplex runs from the clamped optimum.
    #[arg(long, default_value_t = OptimizerConfig::default().restarts)]
    pub restarts: usize,
    /// Fraction of the sample used for a preliminary search, in (0, 1).
    #[arg(long)]
    pub warm_start: Option<f64>,
    /// Probability floor.
    #[arg(long, default_value_t = OptimizerConfig::default().floor)]
    pub floor: f64,
    /// Write a one-row estimate CSV here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn mle(a: &MleArgs) -> CliResult<()> {
    let scheme = load_model(&a.model)?;
    let (x, y) = a.input.load(&scheme.alphabet)?;
    let cfg = OptimizerConfig {
        multistart: a.multistart,
        max_evaluations: a.max_evaluations,
        tolerance: a.tolerance,
        restarts: a.restarts,
        warm_start: a.warm_start,
        floor: a.floor,
        criterion: a.criterion,
        ..OptimizerConfig::default()
    };
    let r = fit(&Observation::new(x, y, a.t), &scheme, &a.free, &a.fixed, &cfg)?;
    for (n, v) in r.names.iter().zip(&r.beta_hat) {
        println!("{n} {}", fmt_float(*v));
    }
    println!("criterion {}", fmt_float(r.criterion_value));
    println!("evaluations {}", r.evaluations);
    println!("converged {}", r.converged);
    if r.weakly_identified {
        eprintln!("warning: the rate is weakly identified along the final simplex");
    }
    if let Some(out) = &a.out {
        let row = EstimateRow {
            replicate_index: 0,
            seed: 0,
            estimates: r.beta_hat.clone(),
            criterion: r.criterion_value,
            evaluations: r.evaluations,
            converged: r.converged,
        };
        let names: Vec<String> = r.names.iter().map(|n| n.to_string()).collect();
        let mut bytes = Vec::new();
        write_estimates_csv(&mut bytes, &names, &[row]).map_err(|e| CliError::Usage(e.to_string()))?;
        write_with_manifest("mle", a, out, &bytes, r.evaluations as u64)?;
    }
    if !r.converged {
        return Err(pairhmm::Error::NotConverged(format!(
            "budget of {} evaluations per start used up; best point reported",
            a.max_evaluations
        ))
        .into());
    }
    Ok(())
}

#[derive(Args, Debug, Serialize)]
pub struct PosteriorArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[command(flatten)]
    pub input: PairInput,
    /// Coordinate the grid runs over.
    #[arg(long)]
    pub param: ParamName,
    #[arg(long)]
    pub min: f64,
    #[arg(long)]
    pub max: f64,
    #[arg(long, default_value_t = 21)]
    pub steps: usize,
    #[arg(long)]
    pub t: Option<usize>,
    #[arg(long, default_value = "q")]
    pub criterion: Criterion,
    /// Write the grid (value, prior, log_criterion, posterior) here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn posterior(a: &PosteriorArgs) -> CliResult<()> {
    let scheme = load_model(&a.model)?;
    let (x, y) = a.input.load(&scheme.alphabet)?;
    let points: Vec<Vec<f64>> = linspace(a.min, a.max, a.steps).into_iter().map(|v| vec![v]).collect();
    let g = posterior_grid(&Observation::new(x, y, a.t), &scheme, &[a.param], &points, &[], a.criterion)?;
    let (_, mode) = g.mode();
    println!("mode {} {}", a.param, fmt_float(mode[0]));
    println!("log_normalizer {}", fmt_float(g.log_normalizer));
    if let Some(out) = &a.out {
        let rows: Vec<Vec<String>> = (0..g.points.len())
            .map(|i| {
                vec![
                    fmt_float(g.points[i][0]),
                    fmt_float(g.prior[i]),
                    fmt_float(g.log_criterion[i]),
                    fmt_float(g.posterior[i]),
                ]
            })
            .collect();
        let bytes = table(&[a.param.as_str(), "prior", "log_criterion", "posterior"], &rows)?;
        write_with_manifest("posterior", a, out, &bytes, g.points.len() as u64)?;
    }
    Ok(())
}
