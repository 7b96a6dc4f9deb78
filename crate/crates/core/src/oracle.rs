//! Brute-force references over explicit path enumerations.
//!
//! Nothing here shares code with [`crate::dp`]: each probability is recomputed
//! path by path (or step by step for the marginal) so that a bug in one
//! recursion cannot hide in its own check. Small instances only.

use crate::alphabet::Symbol;
use crate::error::{Error, Result};
use crate::model::{endpoint, HiddenState, ModelParams};
use crate::scalar::{ln_prob, log_sum_exp, Real};

/// Largest path set [`enumerate_paths`] will build.
pub const ENUMERATION_CAP: u128 = 1_000_000;

/// Every lattice path from `(0, 0)` to `(n, m)` with steps `H`, `V`, `D`.
#[derive(Clone, Debug, PartialEq)]
pub struct PathSet {
    pub endpoint: (usize, usize),
    pub paths: Vec<Vec<HiddenState>>,
}

/// Number of lattice paths to `(n, m)`.
pub fn delannoy(n: usize, m: usize) -> u128 {
    let mut row = vec![1u128; m + 1];
    for _ in 1..=n {
        let mut diag = row[0];
        for j in 1..=m {
            let up = row[j];
            row[j] = row[j].saturating_add(row[j - 1]).saturating_add(diag);
            diag = up;
        }
    }
    row[m]
}

pub fn enumerate_paths(n: usize, m: usize) -> Result<PathSet> {
    if n + m == 0 {
        return Err(Error::EmptyInput);
    }
    let count = delannoy(n, m);
    if count > ENUMERATION_CAP {
        return Err(Error::TooLarge(format!(
            "{count} paths to ({n}, {m}), cap {ENUMERATION_CAP}"
        )));
    }
    let mut paths = Vec::with_capacity(count as usize);
    let mut stack = Vec::with_capacity(n + m);
    extend(n, m, &mut stack, &mut paths);
    Ok(PathSet {
        endpoint: (n, m),
        paths,
    })
}

fn extend(n: usize, m: usize, stack: &mut Vec<HiddenState>, out: &mut Vec<Vec<HiddenState>>) {
    if n == 0 && m == 0 {
        out.push(stack.clone());
        return;
    }
    for s in HiddenState::ALL {
        let (a, b) = s.step();
        if a <= n && b <= m {
            stack.push(s);
            extend(n - a, m - b, stack, out);
            stack.pop();
        }
    }
}

/// `log P(path)` for the hidden chain alone.
fn log_path<T: Real>(theta: &ModelParams<T>, path: &[HiddenState]) -> T {
    let mut lp = ln_prob(theta.mu()[path[0].index()]);
    for w in path.windows(2) {
        lp = lp + ln_prob(theta.pi().get(w[0], w[1]));
    }
    lp
}

/// `log P(path, x, y)` for a path ending exactly at `(|x|, |y|)`.
fn log_joint<T: Real>(theta: &ModelParams<T>, path: &[HiddenState], x: &[Symbol], y: &[Symbol]) -> T {
    let e = theta.emissions();
    let mut lp = log_path(theta, path);
    let (mut i, mut j) = (0, 0);
    for s in path {
        let p = match s {
            HiddenState::H => e.f(x[i]),
            HiddenState::V => e.g(y[j]),
            HiddenState::D => e.h(x[i], y[j]),
        };
        lp = lp + ln_prob(p);
        let (a, b) = s.step();
        i += a;
        j += b;
    }
    lp
}

fn paths_for(x: &[Symbol], y: &[Symbol]) -> Result<Vec<Vec<HiddenState>>> {
    Ok(enumerate_paths(x.len(), y.len())?.paths)
}

pub fn brute_log_q<T: Real>(theta: &ModelParams<T>, x: &[Symbol], y: &[Symbol]) -> Result<T> {
    let terms: Vec<T> = paths_for(x, y)?.iter().map(|p| log_joint(theta, p, x, y)).collect();
    Ok(log_sum_exp(&terms))
}

pub fn brute_log_l<T: Real>(theta: &ModelParams<T>, x: &[Symbol], y: &[Symbol], t: usize) -> Result<T> {
    let (n, m) = (x.len(), y.len());
    if t < n.max(m) || t > n + m {
        return Err(Error::InvalidLength {
            t,
            n,
            m,
            lo: n.max(m),
            hi: n + m,
        });
    }
    let terms: Vec<T> = paths_for(x, y)?
        .iter()
        .filter(|p| p.len() == t)
        .map(|p| log_joint(theta, p, x, y))
        .collect();
    Ok(log_sum_exp(&terms))
}

/// Best single path and its joint log-probability. Ties keep the first path
/// in enumeration order.
pub fn brute_max_path<T: Real>(
    theta: &ModelParams<T>,
    x: &[Symbol],
    y: &[Symbol],
) -> Result<(Vec<HiddenState>, T)> {
    let mut best: Option<(Vec<HiddenState>, T)> = None;
    for p in paths_for(x, y)? {
        let v = log_joint(theta, &p, x, y);
        if best.as_ref().map_or(true, |(_, b)| v > *b) {
            best = Some((p, v));
        }
    }
    Ok(best.expect("at least one path"))
}

/// `log P(the walk visits (n, m))`.
pub fn brute_log_hitting<T: Real>(theta: &ModelParams<T>, n: usize, m: usize) -> Result<T> {
    let terms: Vec<T> = enumerate_paths(n, m)?.paths.iter().map(|p| log_path(theta, p)).collect();
    Ok(log_sum_exp(&terms))
}

/// `log P(Z_t = (n, m))`.
pub fn brute_log_endpoint<T: Real>(theta: &ModelParams<T>, n: usize, m: usize, t: usize) -> Result<T> {
    let terms: Vec<T> = enumerate_paths(n, m)?
        .paths
        .iter()
        .filter(|p| p.len() == t)
        .map(|p| log_path(theta, p))
        .collect();
    debug_assert!(enumerate_paths(n, m)?.paths.iter().all(|p| endpoint(p) == (n, m)));
    Ok(log_sum_exp(&terms))
}

/// Marginal log-probability of the prefixes together with a bound on the
/// absolute error of `exp(log_value)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AbsorbedMarginal<T> {
    pub log_value: T,
    pub error_bound: f64,
    pub steps: usize,
}

/// Step cap for [`brute_marginal_absorbing`].
pub const ABSORBING_STEP_CAP: usize = 1_000_000;

/// Time-expanded computation of `P(X_{1:n} = x, Y_{1:m} = y)`.
///
/// Positions are capped at `(n, m)`; letters past the observed prefixes are
/// summed out (factor one, or a marginal of `h` on a diagonal step). Mass that
/// reaches `(n, m)` has emitted both prefixes and is absorbed. Iterates until
/// the mass still in transit is at most `tol`; the true value then lies in
/// `[absorbed, absorbed + tol]`.
pub fn brute_marginal_absorbing<T: Real>(
    theta: &ModelParams<T>,
    x: &[Symbol],
    y: &[Symbol],
    tol: f64,
) -> Result<AbsorbedMarginal<T>> {
    let (n, m) = (x.len(), y.len());
    if n + m == 0 {
        return Err(Error::EmptyInput);
    }
    let e = theta.emissions();
    let k = e.size();
    let row_sum = |a: Symbol| (0..k).fold(T::zero(), |s, b| s + e.h(a, b as Symbol));
    let col_sum = |b: Symbol| (0..k).fold(T::zero(), |s, a| s + e.h(a as Symbol, b));
    // Factor and destination of one step of kind `s` from `(i, j)`.
    let step = |s: usize, i: usize, j: usize| -> (T, usize, usize) {
        match s {
            0 if i < n => (e.f(x[i]), i + 1, j),
            0 => (T::one(), i, j),
            1 if j < m => (e.g(y[j]), i, j + 1),
            1 => (T::one(), i, j),
            _ if i < n && j < m => (e.h(x[i], y[j]), i + 1, j + 1),
            _ if i < n => (row_sum(x[i]), i + 1, j),
            _ => (col_sum(y[j]), i, j + 1),
        }
    };
    let idx = |i: usize, j: usize, s: usize| (i * (m + 1) + j) * 3 + s;
    let size = (n + 1) * (m + 1) * 3;
    let pi = theta.pi();
    let mut mass = vec![T::zero(); size];
    let mut absorbed = T::zero();

    let deposit = |mass: &mut Vec<T>, absorbed: &mut T, s: usize, w: T, i: usize, j: usize| {
        let (p, a, b) = step(s, i, j);
        if (a, b) == (n, m) {
            *absorbed = *absorbed + w * p;
        } else {
            mass[idx(a, b, s)] = mass[idx(a, b, s)] + w * p;
        }
    };
    for s in 0..3 {
        deposit(&mut mass, &mut absorbed, s, theta.mu()[s], 0, 0);
    }
    let mut steps = 1;
    loop {
        let in_transit: f64 = mass.iter().map(|v| v.f64()).sum();
        if in_transit <= tol {
            return Ok(AbsorbedMarginal {
                log_value: ln_prob(absorbed),
                error_bound: in_transit,
                steps,
            });
        }
        if steps >= ABSORBING_STEP_CAP {
            return Err(Error::NotConverged(format!(
                "{in_transit:e} mass still in transit after {steps} steps"
            )));
        }
        let mut next = vec![T::zero(); size];
        for i in 0..=n {
            for j in 0..=m {
                for from in HiddenState::ALL {
                    let w = mass[idx(i, j, from.index())];
                    if w == T::zero() {
                        continue;
                    }
                    for to in HiddenState::ALL {
                        let p = pi.get(from, to);
                        deposit(&mut next, &mut absorbed, to.index(), w * p, i, j);
                    }
                }
            }
        }
        mass = next;
        steps += 1;
    }
}
