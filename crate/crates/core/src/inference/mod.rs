//! Maximum-likelihood and grid-posterior estimation of scheme coordinates.

pub mod nelder_mead;
mod posterior;
pub mod reparam;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alphabet::Symbol;
use crate::dp::{self, Criterion, DpWorkspace};
use crate::error::{Error, Result};
use crate::model::{theta_from_beta, ModelParams, ParamFloor, ParamName, ParametrizationScheme, SchemeVariant};
use crate::simulate::AlignmentSample;

pub use nelder_mead::{minimize, NelderMeadConfig, NelderMeadResult};
pub use posterior::{linspace, posterior_grid, PosteriorGrid};
pub use reparam::Coordinate;

/// An observed pair, with the alignment length when it is known (simulation).
#[derive(Clone, Debug, PartialEq)]
pub struct Observation {
    pub x: Vec<Symbol>,
    pub y: Vec<Symbol>,
    pub t: Option<usize>,
}

impl Observation {
    pub fn new(x: Vec<Symbol>, y: Vec<Symbol>, t: Option<usize>) -> Self {
        Observation { x, y, t }
    }

    pub fn from_sample(s: &AlignmentSample) -> Self {
        Observation {
            x: s.x.clone(),
            y: s.y.clone(),
            t: Some(s.t()),
        }
    }

    /// Divisor of the reported criterion: `t` when known, else `max(n, m)`,
    /// the smallest length consistent with the pair.
    pub fn normalizer(&self) -> f64 {
        self.t.unwrap_or(self.x.len().max(self.y.len())).max(1) as f64
    }
}

/// Natural-log value of `criterion` for the observation.
pub fn log_criterion(
    ws: &mut DpWorkspace,
    theta: &ModelParams,
    obs: &Observation,
    criterion: Criterion,
) -> Result<f64> {
    let r = match criterion {
        Criterion::Q => dp::log_q_with(ws, theta, &obs.x, &obs.y)?,
        Criterion::Marginal => dp::log_marginal_with(ws, theta, &obs.x, &obs.y)?,
        Criterion::FixedT => {
            let t = obs.t.ok_or_else(|| {
                Error::InvalidParameter("the fixed-length criterion needs a known t".into())
            })?;
            dp::log_l_fixed_t_with(ws, theta, &obs.x, &obs.y, t)?
        }
    };
    Ok(r.value)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    /// Number of screened candidates the simplex search is started from.
    pub multistart: usize,
    /// Initial simplex offset in unconstrained coordinates.
    pub initial_step: f64,
    /// Evaluation budget of each simplex run.
    pub max_evaluations: usize,
    /// Convergence tolerance on the normalized criterion.
    pub tolerance: f64,
    /// Fresh simplices around the best point after convergence, each started
    /// from the point pulled inside the box; stops once one gains less than
    /// `tolerance`. Undoes collapse along flat directions and near box edges,
    /// where the logistic map hides the slope.
    pub restarts: usize,
    /// Probability floor `delta`.
    pub floor: f64,
    pub alpha_bounds: (f64, f64),
    /// Largest number of screened candidates.
    pub screen_cap: usize,
    pub criterion: Criterion,
    /// Fraction of each sequence used for a preliminary search whose end point
    /// starts the full-data search, which then uses a quarter of
    /// `initial_step`. Ignored for the fixed-length criterion.
    pub warm_start: Option<f64>,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            multistart: 5,
            initial_step: 0.5,
            max_evaluations: 2000,
            tolerance: 1e-8,
            restarts: 2,
            floor: ParamFloor::ESTIMATION_DEFAULT,
            alpha_bounds: (1e-3, 2.0),
            screen_cap: 32,
            criterion: Criterion::Q,
            warm_start: None,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.to_string()));
        if self.multistart == 0 || self.max_evaluations == 0 || self.screen_cap == 0 {
            return bad("multistart, max_evaluations and screen_cap must be positive");
        }
        if !(self.initial_step > 0.0 && self.tolerance > 0.0) {
            return bad("initial_step and tolerance must be positive");
        }
        let (a, b) = self.alpha_bounds;
        if !(a > 0.0 && b > a && b.is_finite()) {
            return bad("alpha_bounds must satisfy 0 < min < max");
        }
        if self.warm_start.is_some_and(|f| !(f > 0.0 && f < 1.0)) {
            return bad("warm_start must lie in (0, 1)");
        }
        ParamFloor::new(self.floor).map(|_| ())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StartTrace {
    pub start: Vec<f64>,
    pub end: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EstimateReport {
    pub names: Vec<ParamName>,
    pub beta_hat: Vec<f64>,
    pub scheme_hat: ParametrizationScheme,
    /// Normalized criterion at `beta_hat`; the largest value seen.
    pub criterion_value: f64,
    pub evaluations: usize,
    pub converged: bool,
    /// The criterion barely changes along the rate axis of the final simplex.
    pub weakly_identified: bool,
    pub starts: Vec<StartTrace>,
}

/// Objective on unconstrained coordinates: normalized criterion or `-inf`
/// outside the feasible set.
struct Objective<'a> {
    obs: &'a Observation,
    template: ParametrizationScheme,
    coords: Vec<Coordinate>,
    floor: ParamFloor,
    criterion: Criterion,
}

impl Objective<'_> {
    fn scheme_at(&self, u: &[f64]) -> Result<ParametrizationScheme> {
        let assign: Vec<(ParamName, f64)> =
            self.coords.iter().zip(u).map(|(c, &u)| (c.name, c.to_value(u))).collect();
        self.template.with(&assign)
    }

    fn value(&self, ws: &mut DpWorkspace, u: &[f64]) -> f64 {
        let mut eval = || -> Result<f64> {
            let scheme = self.scheme_at(u)?;
            let theta = theta_from_beta::<f64>(&scheme, Some(self.floor))?;
            log_criterion(ws, &theta, self.obs, self.criterion)
        };
        match eval() {
            Ok(v) if !v.is_nan() => v / self.obs.normalizer(),
            _ => f64::NEG_INFINITY,
        }
    }
}

fn radical_inverse(mut i: usize, base: usize) -> f64 {
    let (mut f, mut r) = (1.0, 0.0);
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// Restarts begin at box fractions within `[0.02, 0.98]`.
const RESTART_EDGE: f64 = 3.891_820_298_110_627; // logit(0.98)

const PRIMES: [usize; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

/// Candidate starts as box fractions: the full three-level lattice when it fits
/// under `cap`, else the box centre plus a Halton design.
fn screening_design(dim: usize, cap: usize) -> Vec<Vec<f64>> {
    let levels = [0.25, 0.5, 0.75];
    let full = 3usize.checked_pow(dim as u32).filter(|&c| c <= cap);
    if let Some(count) = full {
        return (0..count)
            .map(|mut c| {
                (0..dim)
                    .map(|_| {
                        let l = levels[c % 3];
                        c /= 3;
                        l
                    })
                    .collect()
            })
            .collect();
    }
    let mut out = vec![vec![0.5; dim]];
    for i in 1..cap {
        out.push((0..dim).map(|d| 0.15 + 0.7 * radical_inverse(i, PRIMES[d % PRIMES.len()])).collect());
    }
    out
}

/// Maximizes the criterion over the `free` coordinates of `template`, the others
/// held at their template values overridden by `fixed`.
pub fn mle(
    obs: &Observation,
    template: &ParametrizationScheme,
    free: &[ParamName],
    fixed: &[(ParamName, f64)],
    cfg: &OptimizerConfig,
) -> Result<EstimateReport> {
    cfg.validate()?;
    if obs.x.is_empty() && obs.y.is_empty() {
        return Err(Error::EmptyInput);
    }
    if matches!(template.variant, SchemeVariant::Raw(_)) {
        return Err(Error::InvalidParameter("a raw model has no coordinates to estimate".into()));
    }
    if free.is_empty() {
        return Err(Error::InvalidParameter("no free parameters".into()));
    }
    for (i, n) in free.iter().enumerate() {
        if !template.names().contains(n) {
            return Err(Error::InvalidParameter(format!(
                "`{n}` is not a coordinate of the {} scheme",
                template.kind()
            )));
        }
        if free[..i].contains(n) || fixed.iter().any(|(f, _)| f == n) {
            return Err(Error::InvalidParameter(format!("`{n}` listed twice")));
        }
    }
    let floor = ParamFloor::new(cfg.floor)?;
    let objective = Objective {
        obs,
        template: template.with(fixed)?,
        coords: free
            .iter()
            .map(|&n| Coordinate::for_param(n, cfg.floor, cfg.alpha_bounds))
            .collect(),
        floor,
        criterion: cfg.criterion,
    };
    let to_u = |s: &[f64]| -> Vec<f64> {
        s.iter().map(|&s| (s / (1.0 - s)).ln()).collect()
    };
    let to_beta = |u: &[f64]| -> Vec<f64> {
        objective.coords.iter().zip(u).map(|(c, &u)| c.to_value(u)).collect()
    };

    // Screen the design, best first; ties keep design order.
    let design = screening_design(free.len(), cfg.screen_cap);
    let mut screened: Vec<(f64, Vec<f64>)> = {
        let mut ws = DpWorkspace::new();
        design
            .iter()
            .map(|s| {
                let u = to_u(s);
                (objective.value(&mut ws, &u), u)
            })
            .collect()
    };
    let mut evaluations = screened.len();
    screened.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let starts: Vec<Vec<f64>> = screened
        .iter()
        .filter(|(v, _)| v.is_finite())
        .take(cfg.multistart)
        .map(|(_, u)| u.clone())
        .collect();
    if starts.is_empty() {
        // Report why the template itself is infeasible when it is.
        theta_from_beta::<f64>(&objective.template, Some(floor))?;
        return Err(Error::NotConverged("no feasible starting point in the screening design".into()));
    }

    let nm = NelderMeadConfig {
        initial_step: cfg.initial_step,
        max_evaluations: cfg.max_evaluations,
        f_tol: cfg.tolerance,
    };
    let prefix = |v: &[Symbol], f: f64| v[..(v.len() as f64 * f).ceil() as usize].to_vec();
    let warm_obs = cfg
        .warm_start
        .filter(|_| cfg.criterion != Criterion::FixedT)
        .map(|f| Observation::new(prefix(&obs.x, f), prefix(&obs.y, f), None));
    let warm = warm_obs.as_ref().map(|o| Objective {
        obs: o,
        template: objective.template.clone(),
        coords: objective.coords.clone(),
        floor,
        criterion: cfg.criterion,
    });
    let fine = NelderMeadConfig {
        initial_step: if warm.is_some() { nm.initial_step / 4.0 } else { nm.initial_step },
        ..nm
    };
    let runs: Vec<NelderMeadResult> = starts
        .par_iter()
        .map(|u0| {
            let mut ws = DpWorkspace::new();
            let mut spent = 0;
            let mut from = u0.clone();
            if let Some(warm) = &warm {
                let pre = minimize(|u| -warm.value(&mut ws, u), u0, &nm);
                spent += pre.evaluations;
                if pre.value.is_finite() {
                    from = pre.x;
                }
            }
            let mut best = minimize(|u| -objective.value(&mut ws, u), &from, &fine);
            spent += best.evaluations;
            for _ in 0..cfg.restarts {
                if !best.converged || spent >= cfg.max_evaluations {
                    break;
                }
                let inside: Vec<f64> = best.x.iter().map(|u| u.clamp(-RESTART_EDGE, RESTART_EDGE)).collect();
                let budget = NelderMeadConfig { max_evaluations: cfg.max_evaluations - spent, ..nm };
                let next = minimize(|u| -objective.value(&mut ws, u), &inside, &budget);
                spent += next.evaluations;
                let gain = best.value - next.value;
                if gain > 0.0 {
                    best = next;
                }
                if gain < cfg.tolerance {
                    break;
                }
            }
            best.evaluations = spent;
            best
        })
        .collect();
    evaluations += runs.iter().map(|r| r.evaluations).sum::<usize>();

    let mut best_run = 0;
    for (i, r) in runs.iter().enumerate() {
        if r.value < runs[best_run].value {
            best_run = i;
        }
    }
    let mut best_u = runs[best_run].x.clone();
    let mut best_v = -runs[best_run].value;
    if screened[0].0 > best_v {
        best_u = screened[0].1.clone();
        best_v = screened[0].0;
    }

    let mut weakly_identified = false;
    if let Some(a) = free.iter().position(|&n| n == ParamName::Alpha).filter(|_| free.len() > 1) {
        let simplex = &runs[best_run].simplex;
        let lo = simplex.iter().map(|p| p[a]).fold(f64::INFINITY, f64::min);
        let hi = simplex.iter().map(|p| p[a]).fold(f64::NEG_INFINITY, f64::max);
        let mut ws = DpWorkspace::new();
        let (mut vmin, mut vmax) = (best_v, best_v);
        for edge in [lo, hi] {
            let mut u = best_u.clone();
            u[a] = edge;
            let v = objective.value(&mut ws, &u);
            evaluations += 1;
            vmin = vmin.min(v);
            vmax = vmax.max(v);
            if v > best_v {
                best_v = v;
                best_u = u;
            }
        }
        weakly_identified = vmax - vmin < 10.0 * cfg.tolerance;
    }

    let scheme_hat = objective.scheme_at(&best_u)?;
    Ok(EstimateReport {
        names: free.to_vec(),
        beta_hat: to_beta(&best_u),
        scheme_hat,
        criterion_value: best_v,
        evaluations,
        converged: runs[best_run].converged,
        weakly_identified,
        starts: starts
            .iter()
            .zip(&runs)
            .map(|(u0, r)| StartTrace {
                start: to_beta(u0),
                end: to_beta(&r.x),
                value: -r.value,
                evaluations: r.evaluations,
                converged: r.converged,
            })
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_and_halton_designs() {
        let d = screening_design(2, 32);
        assert_eq!(d.len(), 9);
        assert!(d.contains(&vec![0.5, 0.5]));
        let d = screening_design(6, 32);
        assert_eq!(d.len(), 32);
        assert_eq!(d[0], vec![0.5; 6]);
        assert!(d.iter().flatten().all(|&s| s > 0.1 && s < 0.9));
    }

    #[test]
    fn normalizer() {
        let o = Observation::new(vec![0; 5], vec![0; 7], None);
        assert_eq!(o.normalizer(), 7.0);
        let o = Observation::new(vec![0; 5], vec![0; 7], Some(9));
        assert_eq!(o.normalizer(), 9.0);
    }
}
