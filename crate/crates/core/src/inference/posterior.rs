use crate::dp::{Criterion, DpWorkspace};
use crate::error::{Error, Result};
use crate::model::{theta_from_beta, ParamName, ParametrizationScheme};
use crate::scalar::log_sum_exp;

use super::{log_criterion, Observation};

/// Normalized criterion-weighted prior over a finite grid of scheme coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct PosteriorGrid {
    pub names: Vec<ParamName>,
    pub points: Vec<Vec<f64>>,
    pub prior: Vec<f64>,
    /// Natural-log criterion at each point; `-inf` where the point is infeasible.
    pub log_criterion: Vec<f64>,
    pub posterior: Vec<f64>,
    pub log_normalizer: f64,
}

impl PosteriorGrid {
    /// Index and coordinates of the largest posterior mass; ties keep the first.
    pub fn mode(&self) -> (usize, &[f64]) {
        let mut best = 0;
        for (i, &w) in self.posterior.iter().enumerate() {
            if w > self.posterior[best] {
                best = i;
            }
        }
        (best, &self.points[best])
    }

    /// Posterior mass of the points within sup-distance `radius` of `center`.
    pub fn mass_within(&self, center: &[f64], radius: f64) -> f64 {
        self.points
            .iter()
            .zip(&self.posterior)
            .filter(|(p, _)| p.iter().zip(center).all(|(a, b)| (a - b).abs() <= radius))
            .map(|(_, w)| w)
            .sum()
    }
}

/// `n` evenly spaced values from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// Posterior over `points` (coordinates ordered as `names`) with weights
/// proportional to `prior * exp(criterion)`. An empty `prior` means uniform.
pub fn posterior_grid(
    obs: &Observation,
    template: &ParametrizationScheme,
    names: &[ParamName],
    points: &[Vec<f64>],
    prior: &[f64],
    criterion: Criterion,
) -> Result<PosteriorGrid> {
    if points.is_empty() {
        return Err(Error::InvalidParameter("empty grid".into()));
    }
    if points.iter().any(|p| p.len() != names.len()) {
        return Err(Error::InvalidParameter("grid point dimension differs from the names".into()));
    }
    let prior = if prior.is_empty() {
        vec![1.0 / points.len() as f64; points.len()]
    } else if prior.len() != points.len() || prior.iter().any(|&w| !(w >= 0.0 && w.is_finite())) {
        return Err(Error::InvalidParameter("prior must be one finite non-negative weight per point".into()));
    } else {
        prior.to_vec()
    };
    let mut ws = DpWorkspace::new();
    let mut log_crit = Vec::with_capacity(points.len());
    for p in points {
        let assign: Vec<(ParamName, f64)> = names.iter().copied().zip(p.iter().copied()).collect();
        let value = template
            .with(&assign)
            .and_then(|s| theta_from_beta::<f64>(&s, None))
            .and_then(|theta| log_criterion(&mut ws, &theta, obs, criterion));
        log_crit.push(value.unwrap_or(f64::NEG_INFINITY));
    }
    let logw: Vec<f64> = log_crit.iter().zip(&prior).map(|(&l, &w)| l + w.ln()).collect();
    let log_normalizer = log_sum_exp(&logw);
    if !log_normalizer.is_finite() {
        return Err(Error::NotConverged("no grid point has positive posterior weight".into()));
    }
    let mut posterior: Vec<f64> = logw.iter().map(|&l| (l - log_normalizer).exp()).collect();
    let total: f64 = posterior.iter().sum();
    posterior.iter_mut().for_each(|w| *w /= total);
    Ok(PosteriorGrid {
        names: names.to_vec(),
        points: points.to_vec(),
        prior,
        log_criterion: log_crit,
        posterior,
        log_normalizer,
    })
}
