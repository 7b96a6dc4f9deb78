//! Marginal probability of the two prefixes, with no constraint that the walk
//! passes through `(n, m)`.
//!
//! Runs backward over suffix cells. `B_e(i, j)` is the probability of emitting
//! `x_{i+1..n}` and `y_{j+1..m}` as the next letters of each sequence, given
//! state `e` at `(i, j)`. Once one sequence is exhausted its letters are
//! summed out: a horizontal step past the end of `x` emits nothing observed and
//! leaves the cell unchanged, giving a geometric run solved in closed form; a
//! diagonal step past the end of `x` contributes the `y`-marginal of `h`.

use crate::alphabet::Symbol;
use crate::dp::tables::{Emit, SeqEmit, Tables};
use crate::dp::{check_nonempty, check_symbols, Cell, Criterion, DpWorkspace, LogLikResult};
use crate::error::Result;
use crate::model::ModelParams;
use crate::scalar::Real;

const H: usize = 0;
const V: usize = 1;
const D: usize = 2;

/// Nudges the last entry so that `(r0 + r1) + r2` is exactly one in floating
/// point; then a row applied to all-one values gives exactly one.
fn exact_unit_sum<T: Real>(r: &mut [T; 3]) {
    let s = r[0] + r[1];
    let mut c = (T::one() - s).max(T::zero());
    for _ in 0..4 {
        let total = s + c;
        if total == T::one() {
            break;
        }
        c = (c - (total - T::one())).max(T::zero());
    }
    r[2] = c;
}

#[inline(always)]
fn dot<T: Real>(r: &[T; 3], a: &[T; 3]) -> T {
    r[0] * a[0] + r[1] * a[1] + r[2] * a[2]
}

/// Requires `m <= n`, `n >= 1`. Returns `(sum_e mu_e A_e(0, 0), exponent)`.
fn backward<T: Real, E: Emit<T>>(
    tab: &Tables<T>,
    em: &E,
    n: usize,
    m: usize,
    ws: &mut DpWorkspace<T>,
) -> (T, i32) {
    let row = &tab.row;
    let leave_h = row[H][V] + row[H][D];
    let leave_v = row[V][H] + row[V][D];
    let (mut below, mut cur) = ws.rows(m + 1);

    for i in (0..=n).rev() {
        std::mem::swap(&mut below, &mut cur);
        for j in (0..=m).rev() {
            if i == n && j == m {
                cur[j] = Cell::new([T::one(); 3], 0);
                continue;
            }
            // Arrival values A_e: probability of taking one `e` step from here
            // and finishing, each at its own exponent.
            let (ah, eh) = if i < n {
                (em.x(i + 1) * below[j].v[H], below[j].e)
            } else {
                (T::zero(), i32::MIN)
            };
            let (av, ev) = if j < m {
                (em.y(j + 1) * cur[j + 1].v[V], cur[j + 1].e)
            } else {
                (T::zero(), i32::MIN)
            };
            let (ad, ed) = if i < n && j < m {
                (em.xy(i + 1, j + 1) * below[j + 1].v[D], below[j + 1].e)
            } else if i < n {
                (em.x_only(i + 1) * below[j].v[D], below[j].e)
            } else {
                (em.y_only(j + 1) * cur[j + 1].v[D], cur[j + 1].e)
            };
            let e = eh.max(ev).max(ed);
            let s = |x: T, ex: i32| if ex == i32::MIN { x } else { x * T::exp2i(ex - e) };
            let mut a = [s(ah, eh), s(av, ev), s(ad, ed)];
            if i == n {
                // Horizontal steps no longer move the walk.
                a[H] = (row[H][V] * a[V] + row[H][D] * a[D]) / leave_h;
            } else if j == m {
                a[V] = (row[V][H] * a[H] + row[V][D] * a[D]) / leave_v;
            }
            if i == 0 && j == 0 {
                return (dot(&tab.mu, &a), e);
            }
            cur[j] = Cell::new([dot(&row[H], &a), dot(&row[V], &a), dot(&row[D], &a)], e);
        }
    }
    unreachable!("loop returns at the origin")
}

/// `log P(X_{1:n} = x, Y_{1:m} = y)`.
pub fn log_marginal<T: Real>(
    theta: &ModelParams<T>,
    x: &[Symbol],
    y: &[Symbol],
) -> Result<LogLikResult<T>> {
    log_marginal_with(&mut DpWorkspace::new(), theta, x, y)
}

pub fn log_marginal_with<T: Real>(
    ws: &mut DpWorkspace<T>,
    theta: &ModelParams<T>,
    x: &[Symbol],
    y: &[Symbol],
) -> Result<LogLikResult<T>> {
    let (n, m) = (x.len(), y.len());
    check_nonempty(n, m)?;
    check_symbols(theta, [x, y])?;
    let mirrored = m > n;
    let mut tab = Tables::for_model(theta, mirrored);
    for r in tab.row.iter_mut() {
        exact_unit_sum(r);
    }
    exact_unit_sum(&mut tab.mu);
    let (v, e) = if mirrored {
        backward(&tab, &SeqEmit { tab: &tab, x: y, y: x }, m, n, ws)
    } else {
        backward(&tab, &SeqEmit { tab: &tab, x, y }, n, m, ws)
    };
    let value = if v > T::zero() {
        v.ln() + T::c(e as f64 * std::f64::consts::LN_2)
    } else {
        T::neg_infinity()
    };
    Ok(LogLikResult {
        value,
        criterion: Criterion::Marginal,
        endpoint: (n, m),
        t: None,
    })
}
