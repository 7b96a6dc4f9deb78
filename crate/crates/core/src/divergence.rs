//! Monte-Carlo estimates of the normalized log-criteria rates and of the
//! divergence rates between two parameters.
//!
//! Replicate `r` is always simulated from `SeedSpec::new(root_seed, r)` under
//! the reference parameter, so every estimate with the same seed and length
//! sees the same data (common random numbers).

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dp::{self, DpWorkspace};
use crate::error::{Error, Result};
use crate::inference::linspace;
use crate::io::fmt_float;
use crate::model::{ModelParams, ParamName, ParametrizationScheme};
use crate::simulate::{simulate_pair, AlignmentSample, SeedSpec};

/// Longest alignment for which fixed-length rates are estimated.
pub const FIXED_T_RATE_CAP: usize = 600;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RateTarget {
    #[serde(rename = "w")]
    W,
    #[serde(rename = "l")]
    L,
    D,
    #[serde(rename = "Dstar")]
    DStar,
}

impl RateTarget {
    pub fn as_str(self) -> &'static str {
        match self {
            RateTarget::W => "w",
            RateTarget::L => "l",
            RateTarget::D => "D",
            RateTarget::DStar => "Dstar",
        }
    }

    /// The rate a divergence is built from, and the rate itself otherwise.
    fn base(self) -> RateTarget {
        match self {
            RateTarget::D | RateTarget::W => RateTarget::W,
            RateTarget::DStar | RateTarget::L => RateTarget::L,
        }
    }
}

impl std::fmt::Display for RateTarget {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for RateTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "w" => Ok(RateTarget::W),
            "l" => Ok(RateTarget::L),
            "D" => Ok(RateTarget::D),
            "Dstar" => Ok(RateTarget::DStar),
            _ => Err(Error::InvalidParameter(format!("unknown target `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RateEstimate {
    pub target: RateTarget,
    pub theta: ModelParams,
    /// Parameter the data are simulated from.
    pub theta0: ModelParams,
    pub t: usize,
    pub replicates: usize,
    pub mean: f64,
    /// Sample standard deviation over `sqrt(R)`; NaN when `R = 1`.
    pub se: f64,
    pub crn: bool,
    /// Per-replicate normalized values, in replicate order.
    pub values: Vec<f64>,
}

/// Mean and standard error, summed in index order.
pub fn mean_se(values: &[f64]) -> (f64, f64) {
    let r = values.len() as f64;
    let mean = values.iter().sum::<f64>() / r;
    if values.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (r - 1.0);
    (mean, (var / r).sqrt())
}

fn check_run(t: usize, replicates: usize, target: RateTarget) -> Result<()> {
    if t == 0 || replicates == 0 {
        return Err(Error::InvalidParameter("t and the replicate count must be positive".into()));
    }
    if target.base() == RateTarget::L && t > FIXED_T_RATE_CAP {
        return Err(Error::TooLarge(format!(
            "fixed-length rate at t = {t}, cap {FIXED_T_RATE_CAP}"
        )));
    }
    Ok(())
}

/// The `R` datasets of a run.
pub fn simulate_replicates(theta0: &ModelParams, t: usize, replicates: usize, root_seed: u64) -> Vec<AlignmentSample> {
    (0..replicates as u64)
        .into_par_iter()
        .map(|r| simulate_pair(theta0, t, SeedSpec::new(root_seed, r)))
        .collect()
}

/// `t^{-1}` times the log-criterion of `target`'s rate on one sample.
fn normalized(ws: &mut DpWorkspace, theta: &ModelParams, s: &AlignmentSample, target: RateTarget) -> Result<f64> {
    let r = match target.base() {
        RateTarget::W => dp::log_q_with(ws, theta, &s.x, &s.y)?,
        _ => dp::log_l_fixed_t_with(ws, theta, &s.x, &s.y, s.t())?,
    };
    Ok(r.value / s.t() as f64)
}

fn rate(theta: &ModelParams, theta0: &ModelParams, t: usize, replicates: usize, root_seed: u64, target: RateTarget) -> Result<RateEstimate> {
    check_run(t, replicates, target)?;
    let data = simulate_replicates(theta0, t, replicates, root_seed);
    let values = data
        .par_iter()
        .map_init(DpWorkspace::new, |ws, s| normalized(ws, theta, s, target))
        .collect::<Result<Vec<f64>>>()?;
    let (mean, se) = mean_se(&values);
    Ok(RateEstimate {
        target,
        theta: theta.clone(),
        theta0: theta0.clone(),
        t,
        replicates,
        mean,
        se,
        crn: false,
        values,
    })
}

/// Estimates the limit of `t^{-1} log Q` at `theta` on data simulated from `theta0`.
pub fn estimate_w(theta: &ModelParams, theta0: &ModelParams, t: usize, replicates: usize, root_seed: u64) -> Result<RateEstimate> {
    rate(theta, theta0, t, replicates, root_seed, RateTarget::W)
}

/// Fixed-length counterpart of [`estimate_w`]; `t` at most [`FIXED_T_RATE_CAP`].
pub fn estimate_l(theta: &ModelParams, theta0: &ModelParams, t: usize, replicates: usize, root_seed: u64) -> Result<RateEstimate> {
    rate(theta, theta0, t, replicates, root_seed, RateTarget::L)
}

/// `D` or `D*` of `theta` relative to `theta0`: per-replicate differences of the
/// normalized criteria at `theta0` and `theta` on the same datasets.
pub fn divergence(
    theta: &ModelParams,
    theta0: &ModelParams,
    t: usize,
    replicates: usize,
    root_seed: u64,
    which: RateTarget,
) -> Result<RateEstimate> {
    if !matches!(which, RateTarget::D | RateTarget::DStar) {
        return Err(Error::InvalidParameter(format!("`{which}` is not a divergence")));
    }
    check_run(t, replicates, which)?;
    let data = simulate_replicates(theta0, t, replicates, root_seed);
    let values = data
        .par_iter()
        .map_init(DpWorkspace::new, |ws, s| {
            Ok(normalized(ws, theta0, s, which)? - normalized(ws, theta, s, which)?)
        })
        .collect::<Result<Vec<f64>>>()?;
    let (mean, se) = mean_se(&values);
    Ok(RateEstimate {
        target: which,
        theta: theta.clone(),
        theta0: theta0.clone(),
        t,
        replicates,
        mean,
        se,
        crn: true,
        values,
    })
}

/// Evenly spaced values of one scheme coordinate; `steps = 1` pins it at `min`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub name: ParamName,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Axis {
    pub fn new(name: ParamName, min: f64, max: f64, steps: usize) -> Self {
        Axis { name, min, max, steps }
    }

    pub fn fixed(name: ParamName, value: f64) -> Self {
        Axis::new(name, value, value, 1)
    }

    pub fn values(&self) -> Vec<f64> {
        linspace(self.min, self.max, self.steps)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceOptions {
    /// Alignment length of the `w` estimates.
    pub t: usize,
    /// Alignment length of the `l` estimates; `None` skips them.
    pub l_t: Option<usize>,
    pub replicates: usize,
    pub root_seed: u64,
    /// Largest allowed cost, in lattice-cell updates.
    pub budget: f64,
}

impl SurfaceOptions {
    pub const DEFAULT_BUDGET: f64 = 2e11;
}

#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceCell {
    pub axis1_value: f64,
    pub axis2_value: f64,
    pub estimate: RateEstimate,
}

/// Rectangular grid of rate estimates; `axis1` varies slowest, `w` cells precede `l` cells.
#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceGrid {
    pub axis1: Axis,
    pub axis2: Axis,
    pub cells: Vec<SurfaceCell>,
}

impl SurfaceGrid {
    pub fn target_cells(&self, target: RateTarget) -> impl Iterator<Item = &SurfaceCell> {
        self.cells.iter().filter(move |c| c.estimate.target == target)
    }

    /// Cell with the largest mean for `target`; ties keep the first.
    pub fn argmax(&self, target: RateTarget) -> Option<&SurfaceCell> {
        self.target_cells(target)
            .fold(None, |best: Option<&SurfaceCell>, c| match best {
                Some(b) if b.estimate.mean >= c.estimate.mean => Some(b),
                _ => Some(c),
            })
    }

    /// Largest minus smallest mean over the cells of `target`.
    pub fn range(&self, target: RateTarget) -> f64 {
        let means: Vec<f64> = self.target_cells(target).map(|c| c.estimate.mean).collect();
        let hi = means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = means.iter().copied().fold(f64::INFINITY, f64::min);
        hi - lo
    }
}

/// Expected cell updates: `n m` per `w` evaluation, `n m min(n, m)` per `l`
/// evaluation, with `n`, `m` at their expected values under `theta0`.
pub fn surface_cost(theta0: &ModelParams, cells: usize, opts: &SurfaceOptions) -> f64 {
    let (a, b) = theta0.mean_step();
    let per = |t: usize| (a * t as f64, b * t as f64);
    let (n, m) = per(opts.t);
    let mut cost = cells as f64 * opts.replicates as f64 * n * m;
    if let Some(lt) = opts.l_t {
        let (n, m) = per(lt);
        cost += cells as f64 * opts.replicates as f64 * n * m * n.min(m);
    }
    cost
}

/// Rate estimates over a grid of `truth`'s coordinates, all cells evaluated on
/// the same datasets simulated from `truth`.
pub fn surface(truth: &ParametrizationScheme, axis1: Axis, axis2: Axis, opts: &SurfaceOptions) -> Result<SurfaceGrid> {
    if axis1.steps == 0 || axis2.steps == 0 {
        return Err(Error::InvalidParameter("axes need at least one step".into()));
    }
    if axis1.name == axis2.name && axis1.steps * axis2.steps > 1 {
        return Err(Error::InvalidParameter("the two axes must differ".into()));
    }
    check_run(opts.t, opts.replicates, RateTarget::W)?;
    if let Some(lt) = opts.l_t {
        check_run(lt, opts.replicates, RateTarget::L)?;
    }
    let theta0 = truth.theta::<f64>()?;
    let n_cells = axis1.steps * axis2.steps;
    let cost = surface_cost(&theta0, n_cells, opts);
    if cost > opts.budget {
        return Err(Error::BudgetExceeded { cost, budget: opts.budget });
    }
    let mut points = Vec::with_capacity(n_cells);
    for &v1 in &axis1.values() {
        for &v2 in &axis2.values() {
            let theta = truth.with(&[(axis1.name, v1), (axis2.name, v2)])?.theta::<f64>()?;
            points.push((v1, v2, theta));
        }
    }
    let mut runs = vec![(RateTarget::W, opts.t)];
    if let Some(lt) = opts.l_t {
        runs.push((RateTarget::L, lt));
    }
    let mut cells = Vec::new();
    for (target, t) in runs {
        let data = simulate_replicates(&theta0, t, opts.replicates, opts.root_seed);
        let jobs: Vec<(usize, usize)> = (0..points.len())
            .flat_map(|c| (0..data.len()).map(move |r| (c, r)))
            .collect();
        let values = jobs
            .par_iter()
            .map_init(DpWorkspace::new, |ws, &(c, r)| normalized(ws, &points[c].2, &data[r], target))
            .collect::<Result<Vec<f64>>>()?;
        for (c, (v1, v2, theta)) in points.iter().enumerate() {
            let vals = values[c * data.len()..(c + 1) * data.len()].to_vec();
            let (mean, se) = mean_se(&vals);
            cells.push(SurfaceCell {
                axis1_value: *v1,
                axis2_value: *v2,
                estimate: RateEstimate {
                    target,
                    theta: theta.clone(),
                    theta0: theta0.clone(),
                    t,
                    replicates: opts.replicates,
                    mean,
                    se,
                    crn: true,
                    values: vals,
                },
            });
        }
    }
    Ok(SurfaceGrid { axis1, axis2, cells })
}

/// Header: `axis1_name, axis1_value, axis2_name, axis2_value, target, t, R, mean, se`.
pub fn write_surface_csv<W: Write>(out: W, grid: &SurfaceGrid) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(["axis1_name", "axis1_value", "axis2_name", "axis2_value", "target", "t", "R", "mean", "se"])?;
    for c in &grid.cells {
        let e = &c.estimate;
        w.write_record([
            grid.axis1.name.as_str().to_string(),
            fmt_float(c.axis1_value),
            grid.axis2.name.as_str().to_string(),
            fmt_float(c.axis2_value),
            e.target.as_str().to_string(),
            e.t.to_string(),
            e.replicates.to_string(),
            fmt_float(e.mean),
            fmt_float(e.se),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// One parsed surface row.
#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceRow {
    pub axis1_name: String,
    pub axis1_value: f64,
    pub axis2_name: String,
    pub axis2_value: f64,
    pub target: RateTarget,
    pub t: usize,
    pub replicates: usize,
    pub mean: f64,
    pub se: f64,
}

pub fn read_surface_csv<R: std::io::Read>(input: R) -> Result<Vec<SurfaceRow>> {
    let bad = |line: usize, message: String| Error::Parse { line, message };
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers().map_err(|e| bad(1, e.to_string()))?.iter().map(String::from).collect();
    if header != ["axis1_name", "axis1_value", "axis2_name", "axis2_value", "target", "t", "R", "mean", "se"] {
        return Err(bad(1, format!("unexpected surface header {header:?}")));
    }
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| bad(line, e.to_string()))?;
        let num = |j: usize| -> Result<f64> { rec[j].parse().map_err(|_| bad(line, format!("bad number `{}`", &rec[j]))) };
        let int = |j: usize| -> Result<usize> { rec[j].parse().map_err(|_| bad(line, format!("bad count `{}`", &rec[j]))) };
        rows.push(SurfaceRow {
            axis1_name: rec[0].to_string(),
            axis1_value: num(1)?,
            axis2_name: rec[2].to_string(),
            axis2_value: num(3)?,
            target: rec[4].parse().map_err(|_| bad(line, format!("bad target `{}`", &rec[4])))?,
            t: int(5)?,
            replicates: int(6)?,
            mean: num(7)?,
            se: num(8)?,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::Alphabet;

    fn truth() -> ParametrizationScheme {
        ParametrizationScheme::iid(0.25, 0.05, Alphabet::dna(), vec![0.25; 4]).unwrap()
    }

    #[test]
    fn mean_and_se() {
        let (m, s) = mean_se(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
        assert!(mean_se(&[1.0]).1.is_nan());
    }

    #[test]
    fn self_divergence_is_exactly_zero() {
        let th = truth().theta::<f64>().unwrap();
        for which in [RateTarget::D, RateTarget::DStar] {
            let d = divergence(&th, &th, 120, 4, 9, which).unwrap();
            assert!(d.values.iter().all(|&v| v == 0.0));
            assert_eq!(d.mean, 0.0);
            assert!(d.crn);
        }
    }

    #[test]
    fn rates_are_non_positive_and_ordered() {
        let th0 = truth().theta::<f64>().unwrap();
        let th = truth().with(&[(ParamName::P, 0.15)]).unwrap().theta::<f64>().unwrap();
        let w = estimate_w(&th, &th0, 150, 5, 3).unwrap();
        let l = estimate_l(&th, &th0, 150, 5, 3).unwrap();
        assert!(w.mean <= 0.0 && l.mean <= 0.0);
        for (a, b) in l.values.iter().zip(&w.values) {
            assert!(a <= b);
        }
    }

    #[test]
    fn fixed_length_cap() {
        let th = truth().theta::<f64>().unwrap();
        assert!(matches!(estimate_l(&th, &th, 601, 1, 0), Err(Error::TooLarge(_))));
        assert!(divergence(&th, &th, 10, 1, 0, RateTarget::W).is_err());
    }

    #[test]
    fn single_cell_surface_matches_estimate_w() {
        let th0 = truth().theta::<f64>().unwrap();
        let opts = SurfaceOptions { t: 200, l_t: None, replicates: 3, root_seed: 5, budget: 1e12 };
        let g = surface(&truth(), Axis::fixed(ParamName::P, 0.25), Axis::fixed(ParamName::Alpha, 0.05), &opts).unwrap();
        assert_eq!(g.cells.len(), 1);
        assert_eq!(g.cells[0].estimate.values, estimate_w(&th0, &th0, 200, 3, 5).unwrap().values);
    }

    #[test]
    fn budget_and_csv() {
        let axis1 = Axis::new(ParamName::P, 0.1, 0.3, 3);
        let axis2 = Axis::fixed(ParamName::Alpha, 0.05);
        let mut opts = SurfaceOptions { t: 60, l_t: Some(30), replicates: 2, root_seed: 1, budget: 10.0 };
        assert!(matches!(surface(&truth(), axis1, axis2, &opts), Err(Error::BudgetExceeded { .. })));
        opts.budget = 1e9;
        let g = surface(&truth(), axis1, axis2, &opts).unwrap();
        assert_eq!(g.cells.len(), 6);
        let mut buf = Vec::new();
        write_surface_csv(&mut buf, &g).unwrap();
        let rows = read_surface_csv(&buf[..]).unwrap();
        assert_eq!(rows.len(), 6);
        assert_eq!(rows[3].target, RateTarget::L);
        assert_eq!(rows[3].t, 30);
        assert_eq!(rows[1].axis1_name, "p");
    }
}
