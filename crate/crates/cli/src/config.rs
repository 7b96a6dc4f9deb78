//! Experiment configuration files.
//!
//! Precedence, lowest first: preset defaults, the config file, command-line flags.
//!
//! ```toml
//! preset = "exp-iid-desk"
//! output_dir = "runs/iid"
//! root_seed = 7
//! t = 3000
//! replicates = 50
//! ```

use std::path::{Path, PathBuf};

use pairhmm::experiment::{preset, ExperimentPlan, PlanOverrides};
use pairhmm::model::format::parse_model;
use pairhmm::model::ParamName;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub preset: Option<String>,
    pub output_dir: Option<PathBuf>,
    /// Model file replacing the preset's true parameter.
    pub model: Option<PathBuf>,
    /// Coordinates estimated by every estimation study.
    pub free: Option<Vec<ParamName>>,
    pub root_seed: Option<u64>,
    pub t: Option<usize>,
    pub replicates: Option<usize>,
    pub l_t: Option<usize>,
    pub multistart: Option<usize>,
    pub budget: Option<f64>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        toml::from_str(&text).map_err(|e| CliError::Input {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }

    /// Fields set in `over` replace those of `self`.
    pub fn merged(self, over: ExperimentConfig) -> Self {
        ExperimentConfig {
            preset: over.preset.or(self.preset),
            output_dir: over.output_dir.or(self.output_dir),
            model: over.model.or(self.model),
            free: over.free.or(self.free),
            root_seed: over.root_seed.or(self.root_seed),
            t: over.t.or(self.t),
            replicates: over.replicates.or(self.replicates),
            l_t: over.l_t.or(self.l_t),
            multistart: over.multistart.or(self.multistart),
            budget: over.budget.or(self.budget),
        }
    }

    pub fn overrides(&self) -> PlanOverrides {
        PlanOverrides {
            root_seed: self.root_seed,
            t: self.t,
            replicates: self.replicates,
            l_t: self.l_t,
            multistart: self.multistart,
            budget: self.budget,
        }
    }

    pub fn plan(&self) -> CliResult<ExperimentPlan> {
        let name = self
            .preset
            .as_deref()
            .ok_or_else(|| CliError::Usage("no preset given (flag or config file)".into()))?;
        let mut plan = preset(name)?;
        plan.apply(&self.overrides());
        if let Some(path) = &self.model {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            let truth = parse_model(&text).map_err(|e| CliError::input(path, e))?;
            for s in &mut plan.estimation {
                if s.truth.kind() != truth.kind() {
                    s.free = truth.names().to_vec();
                }
                s.truth = truth.clone();
            }
            for s in &mut plan.surfaces {
                s.truth = truth.clone();
            }
            for s in &mut plan.posteriors {
                s.truth = truth.clone();
            }
        }
        if let Some(free) = &self.free {
            for s in &mut plan.estimation {
                s.free = free.clone();
            }
        }
        Ok(plan)
    }
}
