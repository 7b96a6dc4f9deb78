//! Exact likelihood engines over the alignment lattice.
//!
//! The forward, fixed-length and marginal recursions run in the linear domain on
//! extended-range cells (see [`cell`]), which gives log-domain range at
//! linear-domain cost. Viterbi runs in the log domain. A plain log-domain
//! full-matrix forward is kept in [`logspace`] as an independent second route.

mod cell;
mod fixed_t;
mod forward;
pub mod logspace;
mod marginal;
mod tables;
mod viterbi;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::alphabet::Symbol;
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::scalar::Real;

pub(crate) use cell::Cell;

pub use fixed_t::{log_endpoint_prob, log_l_fixed_t, log_l_fixed_t_with, FIXED_T_CELL_CAP};
pub use forward::{log_hitting_prob, log_q, log_q_with};
pub use marginal::{log_marginal, log_marginal_with};
pub use viterbi::{viterbi, viterbi_with, ViterbiConfig, ViterbiResult};

/// Which likelihood notion produced a value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Criterion {
    /// Sum over every path through the endpoint.
    Q,
    /// Paths of one prescribed length only.
    FixedT,
    /// Marginal probability of the two prefixes.
    Marginal,
}

impl Criterion {
    pub fn as_str(self) -> &'static str {
        match self {
            Criterion::Q => "q",
            Criterion::FixedT => "fixed-t",
            Criterion::Marginal => "marginal",
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "q" | "Q" => Ok(Criterion::Q),
            "fixed-t" | "l" => Ok(Criterion::FixedT),
            "marginal" => Ok(Criterion::Marginal),
            _ => Err(Error::InvalidParameter(format!("unknown criterion `{s}`"))),
        }
    }
}

/// A natural-log probability and where it came from. `value` is `-inf` when
/// the pair has probability zero under the model (a zero entry was hit).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogLikResult<T: Real = f64> {
    pub value: T,
    pub criterion: Criterion,
    pub endpoint: (usize, usize),
    pub t: Option<usize>,
}

/// Scratch rows reused between calls. One workspace per thread.
#[derive(Debug, Default)]
pub struct DpWorkspace<T: Real = f64> {
    pub(crate) a: Vec<Cell<T>>,
    pub(crate) b: Vec<Cell<T>>,
}

impl<T: Real> DpWorkspace<T> {
    pub fn new() -> Self {
        DpWorkspace {
            a: Vec::new(),
            b: Vec::new(),
        }
    }

    /// Two zeroed rows of `len` cells each.
    pub(crate) fn rows(&mut self, len: usize) -> (&mut Vec<Cell<T>>, &mut Vec<Cell<T>>) {
        for r in [&mut self.a, &mut self.b] {
            r.clear();
            r.resize(len, Cell::zero());
        }
        (&mut self.a, &mut self.b)
    }
}

pub(crate) fn check_symbols<T: Real>(theta: &ModelParams<T>, seqs: [&[Symbol]; 2]) -> Result<()> {
    let k = theta.emissions().size();
    for s in seqs {
        if let Some(&bad) = s.iter().find(|&&c| c as usize >= k) {
            return Err(Error::InvalidParameter(format!(
                "symbol index {bad} outside alphabet of size {k}"
            )));
        }
    }
    Ok(())
}

pub(crate) fn check_nonempty(n: usize, m: usize) -> Result<()> {
    if n == 0 && m == 0 {
        Err(Error::EmptyInput)
    } else {
        Ok(())
    }
}
