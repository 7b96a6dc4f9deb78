use crate::alphabet::Symbol;
use crate::dp::{check_nonempty, check_symbols};
use crate::error::{Error, Result};
use crate::model::{HiddenState, ModelParams};
use crate::scalar::{ln_prob, Real};

const START: u8 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ViterbiConfig {
    /// Largest lattice `(n + 1) * (m + 1)` for which a traceback table is built.
    pub traceback_cap: u128,
}

impl Default for ViterbiConfig {
    fn default() -> Self {
        ViterbiConfig {
            traceback_cap: 40_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ViterbiResult<T: Real = f64> {
    pub path: Vec<HiddenState>,
    /// Joint log-probability of the path and the two sequences.
    pub log_prob: T,
}

/// Whether state `e` can be the last step into cell `(i, j)`.
#[inline]
fn reachable(e: usize, i: usize, j: usize) -> bool {
    match e {
        0 => i >= 1,
        1 => j >= 1,
        _ => i >= 1 && j >= 1,
    }
}

pub fn viterbi<T: Real>(theta: &ModelParams<T>, x: &[Symbol], y: &[Symbol]) -> Result<ViterbiResult<T>> {
    viterbi_with(theta, x, y, &ViterbiConfig::default())
}

/// Most probable path through `(n, m)`. Ties go to the earlier state in the
/// order `H < V < D`, both for the final state and at every traceback step.
pub fn viterbi_with<T: Real>(
    theta: &ModelParams<T>,
    x: &[Symbol],
    y: &[Symbol],
    cfg: &ViterbiConfig,
) -> Result<ViterbiResult<T>> {
    let (n, m) = (x.len(), y.len());
    check_nonempty(n, m)?;
    check_symbols(theta, [x, y])?;
    let cells = (n as u128 + 1) * (m as u128 + 1);
    if cells > cfg.traceback_cap {
        return Err(Error::SizeCap {
            cells,
            cap: cfg.traceback_cap,
        });
    }

    let lpi = theta.pi().entries().map(|r| r.map(ln_prob));
    let lmu = theta.mu().map(ln_prob);
    let em = theta.emissions();
    let lf: Vec<T> = em.f_table().iter().map(|&p| ln_prob(p)).collect();
    let lg: Vec<T> = em.g_table().iter().map(|&p| ln_prob(p)).collect();
    let lh: Vec<T> = em.h_table().iter().map(|&p| ln_prob(p)).collect();
    let k = em.size();

    let width = m + 1;
    let ninf = T::neg_infinity();
    let mut prev = vec![[ninf; 3]; width];
    let mut cur = vec![[ninf; 3]; width];
    // Two bits of predecessor per state.
    let mut back = vec![0u8; (n + 1) * width];

    let best_into = |cell: &[T; 3], to: usize, i: usize, j: usize| -> (T, u8) {
        let mut best = (ninf, u8::MAX);
        for from in 0..3 {
            if !reachable(from, i, j) {
                continue;
            }
            let v = cell[from] + lpi[from][to];
            if best.1 == u8::MAX || v > best.0 {
                best = (v, from as u8);
            }
        }
        best
    };

    for i in 0..=n {
        std::mem::swap(&mut prev, &mut cur);
        for j in 0..=m {
            let mut vals = [ninf; 3];
            let mut bp = [START; 3];
            if i >= 1 {
                let ex = lf[x[i - 1] as usize];
                let (v, b) = if i == 1 && j == 0 {
                    (lmu[0], START)
                } else {
                    best_into(&prev[j], 0, i - 1, j)
                };
                vals[0] = v + ex;
                bp[0] = b;
            }
            if j >= 1 {
                let ey = lg[y[j - 1] as usize];
                let (v, b) = if i == 0 && j == 1 {
                    (lmu[1], START)
                } else {
                    best_into(&cur[j - 1], 1, i, j - 1)
                };
                vals[1] = v + ey;
                bp[1] = b;
            }
            if i >= 1 && j >= 1 {
                let exy = lh[x[i - 1] as usize * k + y[j - 1] as usize];
                let (v, b) = if i == 1 && j == 1 {
                    (lmu[2], START)
                } else {
                    best_into(&prev[j - 1], 2, i - 1, j - 1)
                };
                vals[2] = v + exy;
                bp[2] = b;
            }
            cur[j] = vals;
            back[i * width + j] = bp[0] | (bp[1] << 2) | (bp[2] << 4);
        }
    }

    let last = cur[m];
    let mut state = usize::MAX;
    for e in 0..3 {
        if reachable(e, n, m) && (state == usize::MAX || last[e] > last[state]) {
            state = e;
        }
    }
    let log_prob = last[state];

    let mut path = Vec::with_capacity(n + m);
    let (mut i, mut j) = (n, m);
    loop {
        let s = HiddenState::from_index(state);
        path.push(s);
        let b = (back[i * width + j] >> (2 * state)) & 3;
        let (di, dj) = s.step();
        i -= di;
        j -= dj;
        if b == START {
            break;
        }
        state = b as usize;
    }
    debug_assert_eq!((i, j), (0, 0));
    path.reverse();
    Ok(ViterbiResult { path, log_prob })
}
