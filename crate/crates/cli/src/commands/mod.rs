mod runs;
mod single;

use std::path::{Path, PathBuf};

use clap::Args;
use pairhmm::alphabet::{Alphabet, Symbol};
use pairhmm::io::{read_pair, read_sequence};
use pairhmm::model::format::parse_model;
use pairhmm::model::{ParamName, ParametrizationScheme};

use crate::error::{CliError, CliResult};

pub use runs::{divergence, experiment, simulate, surface, DivergenceArgs, ExperimentArgs, SimulateArgs, SurfaceArgs};
pub use single::{loglik, mle, posterior, viterbi, LoglikArgs, MleArgs, PosteriorArgs, ViterbiArgs};

pub fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn load_model(path: &Path) -> CliResult<ParametrizationScheme> {
    parse_model(&read_text(path)?).map_err(|e| CliError::input(path, e))
}

/// Where the observed pair comes from: one two-record file or two files.
#[derive(Args, Debug, Clone, serde::Serialize)]
pub struct PairInput {
    /// File holding both sequences (two FASTA records or two lines).
    #[arg(long, conflicts_with_all = ["x", "y"])]
    pub pair: Option<PathBuf>,
    /// File holding the first sequence.
    #[arg(long, requires = "y")]
    pub x: Option<PathBuf>,
    /// File holding the second sequence.
    #[arg(long, requires = "x")]
    pub y: Option<PathBuf>,
}

impl PairInput {
    pub fn load(&self, alphabet: &Alphabet) -> CliResult<(Vec<Symbol>, Vec<Symbol>)> {
        match (&self.pair, &self.x, &self.y) {
            (Some(p), _, _) => read_pair(&read_text(p)?, alphabet).map_err(|e| CliError::input(p, e)),
            (None, Some(x), Some(y)) => Ok((
                read_sequence(&read_text(x)?, alphabet).map_err(|e| CliError::input(x, e))?,
                read_sequence(&read_text(y)?, alphabet).map_err(|e| CliError::input(y, e))?,
            )),
            _ => Err(CliError::Usage("give --pair FILE or both --x FILE and --y FILE".into())),
        }
    }
}

/// `name=value`.
pub fn parse_assignment(s: &str) -> Result<(ParamName, f64), String> {
    let (n, v) = s.split_once('=').ok_or_else(|| format!("expected name=value, got `{s}`"))?;
    let name: ParamName = n.trim().parse().map_err(|e: pairhmm::Error| e.to_string())?;
    let value: f64 = v.trim().parse().map_err(|_| format!("bad number `{v}`"))?;
    Ok((name, value))
}

/// `name:min:max:steps`, or `name=value` for a single point.
pub fn parse_axis(s: &str) -> Result<pairhmm::divergence::Axis, String> {
    use pairhmm::divergence::Axis;
    if let Ok((name, v)) = parse_assignment(s) {
        return Ok(Axis::fixed(name, v));
    }
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 4 {
        return Err(format!("expected name:min:max:steps or name=value, got `{s}`"));
    }
    let name: ParamName = parts[0].parse().map_err(|e: pairhmm::Error| e.to_string())?;
    let num = |p: &str| p.parse::<f64>().map_err(|_| format!("bad number `{p}`"));
    let steps: usize = parts[3].parse().map_err(|_| format!("bad step count `{}`", parts[3]))?;
    Ok(Axis::new(name, num(parts[1])?, num(parts[2])?, steps))
}

/// `<file>.manifest.json` next to a single output file.
pub fn manifest_beside(out: &Path) -> PathBuf {
    let mut p = out.as_os_str().to_owned();
    p.push(".manifest.json");
    PathBuf::from(p)
}

pub fn base_dir(out: &Path) -> PathBuf {
    out.parent().map(Path::to_path_buf).unwrap_or_default()
}
