use crate::alphabet::Symbol;
use crate::dp::tables::{Emit, SeqEmit, Tables, UnitEmit};
use crate::dp::{check_nonempty, check_symbols, Cell, Criterion, DpWorkspace, LogLikResult};
use crate::error::Result;
use crate::model::ModelParams;
use crate::scalar::Real;

const H: usize = 0;
const V: usize = 1;
const D: usize = 2;

/// Mass entering `V` from the left neighbour. The `V -> V` term is added last
/// so the row's serial dependency is one multiply and one add.
#[inline(always)]
fn vertical<T: Real>(w: &[T; 3], v: &[T; 3]) -> T {
    (w[0] * v[0] + w[2] * v[2]) + w[1] * v[1]
}

/// Forward recursion over the lattice, one row per `x` position, columns over
/// `y`. Returns the cell at `(n, m)`; requires `n >= 1`.
fn forward<T: Real, E: Emit<T>>(
    tab: &Tables<T>,
    em: &E,
    n: usize,
    m: usize,
    ws: &mut DpWorkspace<T>,
) -> Cell<T> {
    let lanes = em.lanes(n, m);
    let (mut prev, mut cur) = ws.rows(m + 1);
    let [ch, cv, cd] = tab.col;
    // Column emission folded into the vertical weights.
    let gcv: Vec<[T; 3]> = lanes.y.iter().map(|&g| cv.map(|c| g * c)).collect();

    // Row 0: only vertical steps.
    cur[0] = Cell::zero();
    if m >= 1 {
        cur[1] = Cell::new([T::zero(), lanes.y[0] * tab.mu[V], T::zero()], 0);
    }
    for j in 2..=m {
        let left = cur[j - 1];
        cur[j] = Cell::new([T::zero(), lanes.y[j - 1] * left.dot(&cv), T::zero()], left.e);
    }

    for i in 1..=n {
        std::mem::swap(&mut prev, &mut cur);
        let xi = lanes.x[i - 1];
        cur[0] = if i == 1 {
            Cell::new([xi * tab.mu[H], T::zero(), T::zero()], 0)
        } else {
            let up = prev[0];
            Cell::new([xi * up.dot(&ch), T::zero(), T::zero()], up.e)
        };
        if m == 0 {
            continue;
        }
        let xy = &lanes.xy[lanes.class[i - 1]][..m];
        // Column 1 separately: at (1, 1) the diagonal step is the first step.
        let (dv, de) = if i == 1 {
            (tab.mu[D], 0)
        } else {
            (prev[0].dot(&cd), prev[0].e)
        };
        let (up, left) = (prev[1], cur[0]);
        let mut left = Cell::assemble(
            xi * up.dot(&ch),
            up.e,
            vertical(&gcv[0], &left.v),
            left.e,
            xy[0] * dv,
            de,
        );
        cur[1] = left;
        let cells = cur[2..=m].iter_mut().zip(prev[..=m].windows(2).skip(1));
        for ((out, pw), (g, &h)) in cells.zip(gcv[1..].iter().zip(&xy[1..])) {
            let (diag, up) = (pw[0], pw[1]);
            left = Cell::assemble(
                xi * up.dot(&ch),
                up.e,
                vertical(g, &left.v),
                left.e,
                h * diag.dot(&cd),
                diag.e,
            );
            *out = left;
        }
    }
    cur[m]
}

/// `log Q(x, y)`: the probability of the pair summed over every path that
/// passes through `(n, m)`.
pub fn log_q<T: Real>(theta: &ModelParams<T>, x: &[Symbol], y: &[Symbol]) -> Result<LogLikResult<T>> {
    log_q_with(&mut DpWorkspace::new(), theta, x, y)
}

pub fn log_q_with<T: Real>(
    ws: &mut DpWorkspace<T>,
    theta: &ModelParams<T>,
    x: &[Symbol],
    y: &[Symbol],
) -> Result<LogLikResult<T>> {
    let (n, m) = (x.len(), y.len());
    check_nonempty(n, m)?;
    check_symbols(theta, [x, y])?;
    // Rows run over the longer sequence so the rolling rows stay short.
    let value = if m > n {
        let tab = Tables::for_model(theta, true);
        forward(&tab, &SeqEmit { tab: &tab, x: y, y: x }, m, n, ws).ln_total()
    } else {
        let tab = Tables::new(theta);
        forward(&tab, &SeqEmit { tab: &tab, x, y }, n, m, ws).ln_total()
    };
    Ok(LogLikResult {
        value,
        criterion: Criterion::Q,
        endpoint: (n, m),
        t: None,
    })
}

/// Log-probability that the hidden walk ever visits `(n, m)`.
pub fn log_hitting_prob<T: Real>(theta: &ModelParams<T>, n: usize, m: usize) -> Result<T> {
    check_nonempty(n, m)?;
    let mut ws = DpWorkspace::new();
    let mirrored = m > n;
    let tab = Tables::for_model(theta, mirrored);
    let (a, b) = if mirrored { (m, n) } else { (n, m) };
    Ok(forward(&tab, &UnitEmit, a, b, &mut ws).ln_total())
}
