//! Replicated runs: simulation, rate estimates, surfaces and presets.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use pairhmm::divergence::{
    self as div, surface as run_surface, write_surface_csv, Axis, RateEstimate, RateTarget, SurfaceOptions,
};
use pairhmm::experiment::{column_stats, DEFAULT_ROOT_SEED};
use pairhmm::io::{fmt_float, write_estimates_csv, write_fasta, write_path, write_two_line, Record};
use pairhmm::model::{ParamName, ParametrizationScheme};
use pairhmm::simulate::{simulate_pair, SeedSpec};
use rayon::prelude::*;
use serde::Serialize;

use super::single::table;
use super::{base_dir, load_model, manifest_beside, parse_axis};
use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};
use crate::manifest::Run;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeqFormat {
    Fasta,
    Lines,
}

#[derive(Args, Debug, Serialize)]
pub struct SimulateArgs {
    /// Model file; alternatively take the truth, length and count from a preset.
    #[arg(long, required_unless_present = "preset", conflicts_with = "preset")]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub preset: Option<String>,
    /// Hidden path length.
    #[arg(long)]
    pub t: Option<usize>,
    #[arg(long)]
    pub replicates: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value = "fasta")]
    pub format: SeqFormat,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn simulate(a: &SimulateArgs) -> CliResult<()> {
    let (truth, t, replicates, seed) = match (&a.model, &a.preset) {
        (Some(m), _) => (
            load_model(m)?,
            a.t.ok_or_else(|| CliError::Usage("--t is required with --model".into()))?,
            a.replicates.unwrap_or(1),
            a.seed.unwrap_or(DEFAULT_ROOT_SEED),
        ),
        (None, Some(p)) => {
            let plan = pairhmm::experiment::preset(p)?;
            let s = plan
                .estimation
                .first()
                .ok_or_else(|| CliError::Usage(format!("preset `{p}` has no simulated replicates")))?;
            (
                s.truth.clone(),
                a.t.unwrap_or(s.t),
                a.replicates.unwrap_or(s.replicates),
                a.seed.unwrap_or(s.root_seed),
            )
        }
        (None, None) => return Err(CliError::Usage("give --model or --preset".into())),
    };
    let theta = truth.theta::<f64>()?;
    let samples: Vec<_> = (0..replicates as u64)
        .into_par_iter()
        .map(|r| simulate_pair(&theta, t, SeedSpec::new(seed, r)))
        .collect();
    let config = serde_json::json!({ "args": a, "t": t, "replicates": replicates, "seed": seed });
    let mut run = Run::new("simulate", &config, &a.out)?;
    let ext = match a.format {
        SeqFormat::Fasta => "fa",
        SeqFormat::Lines => "txt",
    };
    let mut endpoints = Vec::new();
    for (r, s) in samples.iter().enumerate() {
        let stem = a.out.join(format!("replicate_{r:04}"));
        let mut seqs = Vec::new();
        match a.format {
            SeqFormat::Fasta => {
                let recs = [
                    Record { name: Some("x".into()), seq: s.x.clone() },
                    Record { name: Some("y".into()), seq: s.y.clone() },
                ];
                write_fasta(&mut seqs, theta.alphabet(), &recs)
            }
            SeqFormat::Lines => write_two_line(&mut seqs, theta.alphabet(), &s.x, &s.y),
        }
        .expect("write to memory");
        run.write(&stem.with_extension(ext), &seqs)?;
        let mut path = Vec::new();
        write_path(&mut path, &s.path).expect("write to memory");
        run.write(&stem.with_extension("path"), &path)?;
        endpoints.push(vec![
            r.to_string(),
            seed.to_string(),
            t.to_string(),
            s.endpoint.0.to_string(),
            s.endpoint.1.to_string(),
        ]);
    }
    let bytes = table(&["replicate_index", "seed", "t", "n", "m"], &endpoints)?;
    run.write(&a.out.join("endpoints.csv"), &bytes)?;
    run.finish(&a.out.join("manifest.json"))?;
    println!("{replicates} replicate(s) of length {t} written to {}", a.out.display());
    Ok(())
}

fn estimate_row(e: &RateEstimate) -> Vec<String> {
    vec![
        e.target.to_string(),
        e.t.to_string(),
        e.replicates.to_string(),
        fmt_float(e.mean),
        fmt_float(e.se),
        e.crn.to_string(),
    ]
}

#[derive(Args, Debug, Serialize)]
pub struct DivergenceArgs {
    /// Parameter evaluated.
    #[arg(long)]
    pub model: PathBuf,
    /// Parameter the data are simulated from.
    #[arg(long)]
    pub truth: PathBuf,
    /// D, Dstar, w or l.
    #[arg(long, default_value = "D")]
    pub target: RateTarget,
    #[arg(long)]
    pub t: usize,
    #[arg(long, default_value_t = 20)]
    pub replicates: usize,
    #[arg(long, default_value_t = DEFAULT_ROOT_SEED)]
    pub seed: u64,
    /// Also write a one-row CSV (target, t, R, mean, se, crn) here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn divergence(a: &DivergenceArgs) -> CliResult<()> {
    let theta = load_model(&a.model)?.theta::<f64>()?;
    let theta0 = load_model(&a.truth)?.theta::<f64>()?;
    let e = match a.target {
        RateTarget::W => div::estimate_w(&theta, &theta0, a.t, a.replicates, a.seed)?,
        RateTarget::L => div::estimate_l(&theta, &theta0, a.t, a.replicates, a.seed)?,
        which => div::divergence(&theta, &theta0, a.t, a.replicates, a.seed, which)?,
    };
    println!("{} mean {} se {}", e.target, fmt_float(e.mean), fmt_float(e.se));
    if let Some(out) = &a.out {
        let bytes = table(&["target", "t", "R", "mean", "se", "crn"], &[estimate_row(&e)])?;
        let mut run = Run::new("divergence", a, &base_dir(out))?;
        run.evaluations = (e.replicates * if e.crn { 2 } else { 1 }) as u64;
        run.write(out, &bytes)?;
        run.finish(&manifest_beside(out))?;
    }
    Ok(())
}

#[derive(Args, Debug, Serialize)]
pub struct SurfaceArgs {
    /// Parameter the data are simulated from; the axes vary its coordinates.
    #[arg(long)]
    pub truth: PathBuf,
    /// name:min:max:steps, or name=value.
    #[arg(long, value_parser = parse_axis)]
    pub axis1: Axis,
    #[arg(long, value_parser = parse_axis)]
    pub axis2: Axis,
    /// Length of the w estimates.
    #[arg(long)]
    pub t: usize,
    /// Length of the l estimates; omitted means w only.
    #[arg(long)]
    pub l_t: Option<usize>,
    #[arg(long, default_value_t = 20)]
    pub replicates: usize,
    #[arg(long, default_value_t = DEFAULT_ROOT_SEED)]
    pub seed: u64,
    /// Cost ceiling in lattice-cell updates.
    #[arg(long, default_value_t = SurfaceOptions::DEFAULT_BUDGET)]
    pub budget: f64,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn surface(a: &SurfaceArgs) -> CliResult<()> {
    let truth = load_model(&a.truth)?;
    let opts = SurfaceOptions {
        t: a.t,
        l_t: a.l_t,
        replicates: a.replicates,
        root_seed: a.seed,
        budget: a.budget,
    };
    let g = run_surface(&truth, a.axis1, a.axis2, &opts)?;
    let mut bytes = Vec::new();
    write_surface_csv(&mut bytes, &g).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut run = Run::new("surface", a, &base_dir(&a.out))?;
    run.evaluations = (g.cells.len() * a.replicates) as u64;
    run.write(&a.out, &bytes)?;
    run.finish(&manifest_beside(&a.out))?;
    for target in [RateTarget::W, RateTarget::L] {
        if let Some(c) = g.argmax(target) {
            println!(
                "{target} argmax {}={} {}={}",
                g.axis1.name,
                fmt_float(c.axis1_value),
                g.axis2.name,
                fmt_float(c.axis2_value)
            );
        }
    }
    Ok(())
}

#[derive(Args, Debug, Serialize)]
pub struct ExperimentArgs {
    /// exp-iid-desk, exp-markov-desk or surface-iid-desk.
    #[arg(long)]
    pub preset: Option<String>,
    /// TOML experiment configuration; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Model file replacing the preset's true parameter.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Coordinates estimated by every estimation study, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub free: Option<Vec<ParamName>>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub t: Option<usize>,
    #[arg(long)]
    pub replicates: Option<usize>,
    #[arg(long)]
    pub l_t: Option<usize>,
    #[arg(long)]
    pub multistart: Option<usize>,
    #[arg(long)]
    pub budget: Option<f64>,
}

impl ExperimentArgs {
    fn config(&self) -> CliResult<ExperimentConfig> {
        let file = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        Ok(file.merged(ExperimentConfig {
            preset: self.preset.clone(),
            output_dir: self.out.clone(),
            model: self.model.clone(),
            free: self.free.clone(),
            root_seed: self.seed,
            t: self.t,
            replicates: self.replicates,
            l_t: self.l_t,
            multistart: self.multistart,
            budget: self.budget,
        }))
    }
}

/// Rough likelihood evaluations per fit, used only for the cost warning.
const EVALS_PER_FIT: f64 = 150.0;
/// Lattice cells per second of one forward pass on one core.
const CELLS_PER_SECOND: f64 = 6e7;

fn truth_value(truth: &ParametrizationScheme, n: ParamName) -> String {
    truth.get(n).map(fmt_float).unwrap_or_default()
}

pub fn experiment(a: &ExperimentArgs) -> CliResult<()> {
    let cfg = a.config()?;
    let out = cfg
        .output_dir
        .clone()
        .ok_or_else(|| CliError::Usage("no output directory (--out or output_dir)".into()))?;
    let plan = cfg.plan()?;
    let mut run = Run::new("experiment", &cfg, &out)?;

    let cost: f64 = plan
        .estimation
        .iter()
        .map(|s| {
            let cells = (0.75 * s.t as f64).powi(2);
            s.replicates as f64 * EVALS_PER_FIT * s.free.len() as f64 * cells / CELLS_PER_SECOND
        })
        .sum();
    if cost > 3600.0 {
        eprintln!("warning: estimation studies may take about {:.1} h on one core", cost / 3600.0);
    }

    let mut summary = Vec::new();
    for s in &plan.estimation {
        let fits = s.run()?;
        run.evaluations += fits.iter().map(|f| f.report.evaluations as u64).sum::<u64>();
        let mut bytes = Vec::new();
        write_estimates_csv(&mut bytes, &s.column_names(), &s.rows(&fits))
            .map_err(|e| CliError::Usage(e.to_string()))?;
        run.write(&out.join(format!("{}.estimates.csv", s.label)), &bytes)?;
        for &n in &s.free {
            let (mean, sd) = column_stats(&fits, n).unwrap_or((f64::NAN, f64::NAN));
            summary.push(vec![
                s.label.clone(),
                n.to_string(),
                truth_value(&s.truth, n),
                fmt_float(mean),
                fmt_float(sd),
                fits.len().to_string(),
            ]);
            println!("{} {n}: mean {} sd {}", s.label, fmt_float(mean), fmt_float(sd));
        }
    }
    if !summary.is_empty() {
        let bytes = table(&["study", "parameter", "truth", "mean", "sd", "R"], &summary)?;
        run.write(&out.join("summary.csv"), &bytes)?;
    }

    for s in &plan.surfaces {
        let g = s.run()?;
        run.evaluations += g.cells.iter().map(|c| c.estimate.replicates as u64).sum::<u64>();
        let mut bytes = Vec::new();
        write_surface_csv(&mut bytes, &g).map_err(|e| CliError::Usage(e.to_string()))?;
        run.write(&out.join(format!("{}.surface.csv", s.label)), &bytes)?;
        for target in [RateTarget::W, RateTarget::L] {
            if let Some(c) = g.argmax(target) {
                println!("{} {target} argmax {} {}", s.label, g.axis1.name, fmt_float(c.axis1_value));
            }
        }
    }

    for s in &plan.posteriors {
        let grids = s.run()?;
        run.evaluations += grids.iter().map(|g| g.points.len() as u64).sum::<u64>();
        let mut rows = Vec::new();
        for (r, g) in grids.iter().enumerate() {
            for i in 0..g.points.len() {
                rows.push(vec![
                    r.to_string(),
                    s.root_seed.to_string(),
                    fmt_float(g.points[i][0]),
                    fmt_float(g.prior[i]),
                    fmt_float(g.log_criterion[i]),
                    fmt_float(g.posterior[i]),
                ]);
            }
        }
        let header = ["replicate_index", "seed", s.axis.name.as_str(), "prior", "log_criterion", "posterior"];
        run.write(&out.join(format!("{}.posterior.csv", s.label)), &table(&header, &rows)?)?;
        let near = grids
            .iter()
            .filter(|g| {
                let truth = s.truth.get(s.axis.name).unwrap_or(f64::NAN);
                (g.mode().1[0] - truth).abs() <= s.step() + 1e-12
            })
            .count();
        println!("{}: mode within one step of the truth in {near}/{}", s.label, grids.len());
    }

    let manifest = run.finish(&out.join("manifest.json"))?;
    println!("{} file(s) written to {}", manifest.outputs.len(), display(&out));
    Ok(())
}

fn display(p: &Path) -> String {
    p.display().to_string()
}
