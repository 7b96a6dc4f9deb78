//! Likelihood restricted to paths of one prescribed length `t`.
//!
//! A path through `(n, m)` of length `t` has exactly `d = n + m - t` diagonal
//! steps, so the recursion carries the number of diagonal steps taken so far as
//! an extra layer index and keeps only the terminal layer `d` at `(n, m)`.

use crate::alphabet::Symbol;
use crate::dp::tables::{Emit, SeqEmit, Tables, UnitEmit};
use crate::dp::{check_nonempty, check_symbols, Cell, Criterion, DpWorkspace, LogLikResult};
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::scalar::Real;

const H: usize = 0;
const V: usize = 1;
const D: usize = 2;

/// Largest number of cells (both rolling rows) the layered recursion allocates.
pub const FIXED_T_CELL_CAP: usize = 1 << 24;

fn check_length(n: usize, m: usize, t: usize) -> Result<()> {
    if t < n.max(m) || t > n + m {
        return Err(Error::InvalidLength {
            t,
            n,
            m,
            lo: n.max(m),
            hi: n + m,
        });
    }
    Ok(())
}

/// Requires `m <= n`, `n >= 1` and a valid `t`.
fn layered<T: Real, E: Emit<T>>(
    tab: &Tables<T>,
    em: &E,
    n: usize,
    m: usize,
    t: usize,
    ws: &mut DpWorkspace<T>,
) -> Result<T> {
    let d = n + m - t;
    let width = m.min(d) + 1;
    let cells = (m + 1) * width;
    if 2 * cells > FIXED_T_CELL_CAP {
        return Err(Error::TooLarge(format!(
            "fixed-length recursion needs {} cells (cap {FIXED_T_CELL_CAP})",
            2 * cells
        )));
    }
    // Layer range that can still reach the terminal layer.
    let lo = |i: usize, j: usize| d.saturating_sub((n - i).min(m - j));
    let hi = |i: usize, j: usize| i.min(j).min(d);
    let (mut prev, mut cur) = ws.rows(cells);
    let at = |j: usize, l: usize| j * width + l;

    // Row 0: vertical steps only, layer 0.
    for j in 1..=m {
        if lo(0, j) > 0 {
            continue;
        }
        cur[at(j, 0)] = if j == 1 {
            Cell::new([T::zero(), em.y(1) * tab.mu[V], T::zero()], 0)
        } else {
            let left = cur[at(j - 1, 0)];
            Cell::new([T::zero(), em.y(j) * left.dot(&tab.col[V]), T::zero()], left.e)
        };
    }

    for i in 1..=n {
        std::mem::swap(&mut prev, &mut cur);
        let xi = em.x(i);
        if lo(i, 0) == 0 {
            cur[at(0, 0)] = if i == 1 {
                Cell::new([xi * tab.mu[H], T::zero(), T::zero()], 0)
            } else {
                let up = prev[at(0, 0)];
                Cell::new([xi * up.dot(&tab.col[H]), T::zero(), T::zero()], up.e)
            };
        }
        for j in 1..=m {
            let (yj, xy) = (em.y(j), em.xy(i, j));
            let (hi_up, hi_left) = (hi(i - 1, j), hi(i, j - 1));
            for l in lo(i, j)..=hi(i, j) {
                let (hv, he) = if l <= hi_up {
                    let up = prev[at(j, l)];
                    (xi * up.dot(&tab.col[H]), up.e)
                } else {
                    (T::zero(), super::cell::ZERO_EXP)
                };
                let (vv, ve) = if l <= hi_left {
                    let left = cur[at(j - 1, l)];
                    (yj * left.dot(&tab.col[V]), left.e)
                } else {
                    (T::zero(), super::cell::ZERO_EXP)
                };
                let (dv, de) = if l == 0 {
                    (T::zero(), super::cell::ZERO_EXP)
                } else if i == 1 && j == 1 {
                    (xy * tab.mu[D], 0)
                } else {
                    let diag = prev[at(j - 1, l - 1)];
                    (xy * diag.dot(&tab.col[D]), diag.e)
                };
                cur[at(j, l)] = Cell::assemble(hv, he, vv, ve, dv, de);
            }
        }
    }
    Ok(cur[at(m, d)].ln_total())
}

/// `log` of the probability of the pair jointly with the walk sitting at
/// `(n, m)` after exactly `t` steps.
pub fn log_l_fixed_t<T: Real>(
    theta: &ModelParams<T>,
    x: &[Symbol],
    y: &[Symbol],
    t: usize,
) -> Result<LogLikResult<T>> {
    log_l_fixed_t_with(&mut DpWorkspace::new(), theta, x, y, t)
}

pub fn log_l_fixed_t_with<T: Real>(
    ws: &mut DpWorkspace<T>,
    theta: &ModelParams<T>,
    x: &[Symbol],
    y: &[Symbol],
    t: usize,
) -> Result<LogLikResult<T>> {
    let (n, m) = (x.len(), y.len());
    check_nonempty(n, m)?;
    check_length(n, m, t)?;
    check_symbols(theta, [x, y])?;
    let value = if m > n {
        let tab = Tables::for_model(theta, true);
        layered(&tab, &SeqEmit { tab: &tab, x: y, y: x }, m, n, t, ws)?
    } else {
        let tab = Tables::new(theta);
        layered(&tab, &SeqEmit { tab: &tab, x, y }, n, m, t, ws)?
    };
    Ok(LogLikResult {
        value,
        criterion: Criterion::FixedT,
        endpoint: (n, m),
        t: Some(t),
    })
}

/// `log P(Z_t = (n, m))` for the hidden walk alone.
pub fn log_endpoint_prob<T: Real>(theta: &ModelParams<T>, n: usize, m: usize, t: usize) -> Result<T> {
    check_length(n, m, t)?;
    if n == 0 && m == 0 {
        return Ok(T::zero());
    }
    let mirrored = m > n;
    let tab = Tables::for_model(theta, mirrored);
    let (a, b) = if mirrored { (m, n) } else { (n, m) };
    layered(&tab, &UnitEmit, a, b, t, &mut DpWorkspace::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::Alphabet;
    use crate::model::{EmissionTables, TransitionMatrix};

    fn model() -> ModelParams {
        let pi = TransitionMatrix::new([[0.5, 0.2, 0.3], [0.1, 0.6, 0.3], [0.2, 0.1, 0.7]]).unwrap();
        let e = EmissionTables::new(vec![0.4, 0.6], vec![0.7, 0.3], vec![0.3, 0.1, 0.2, 0.4]).unwrap();
        ModelParams::new(Alphabet::new("ab".chars()).unwrap(), pi, e).unwrap()
    }

    #[test]
    fn one_step_is_a_match() {
        let theta = model();
        let r = log_l_fixed_t(&theta, &[1], &[0], 1).unwrap();
        let want = theta.mu()[2] * 0.2;
        assert!((r.value - want.ln()).abs() < 1e-15);
        assert_eq!(r.t, Some(1));
    }

    #[test]
    fn two_steps_are_the_two_gap_orders() {
        let theta = model();
        let e = theta.pi().entries();
        let [p, q, _] = theta.mu();
        let (fx, gy) = (0.6, 0.7);
        let want = p * e[0][1] * fx * gy + q * e[1][0] * gy * fx;
        let r = log_l_fixed_t(&theta, &[1], &[0], 2).unwrap();
        assert!((r.value - want.ln()).abs() < 1e-15);
    }

    #[test]
    fn length_is_validated() {
        let theta = model();
        assert!(matches!(
            log_l_fixed_t(&theta, &[0, 1], &[0], 1),
            Err(Error::InvalidLength { lo: 2, hi: 3, .. })
        ));
        assert!(log_l_fixed_t(&theta, &[0, 1], &[0], 4).is_err());
    }

    #[test]
    fn endpoint_probabilities_sum_to_one() {
        let theta = model();
        for t in 1..6usize {
            let mut total = 0.0;
            for n in 0..=t {
                for m in 0..=t {
                    if n.max(m) <= t && t <= n + m {
                        total += log_endpoint_prob(&theta, n, m, t).unwrap().exp();
                    }
                }
            }
            assert!((total - 1.0).abs() < 1e-13, "t = {t}: {total}");
        }
    }
}
