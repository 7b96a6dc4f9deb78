//! Full-matrix forward recursion carried out entirely in natural logs.
//!
//! Slower than the scaled-cell engine and quadratic in memory; kept as a
//! second, structurally simple route to `log Q` for cross-checks.

use crate::alphabet::Symbol;
use crate::dp::{check_nonempty, check_symbols, Criterion, LogLikResult};
use crate::error::Result;
use crate::model::ModelParams;
use crate::scalar::{ln_prob, log_sum_exp3, Real};

pub fn log_q_full<T: Real>(theta: &ModelParams<T>, x: &[Symbol], y: &[Symbol]) -> Result<LogLikResult<T>> {
    let (n, m) = (x.len(), y.len());
    check_nonempty(n, m)?;
    check_symbols(theta, [x, y])?;
    let lpi = theta.pi().entries().map(|r| r.map(ln_prob));
    let lmu = theta.mu().map(ln_prob);
    let em = theta.emissions();
    let ninf = T::neg_infinity();
    let mut f = vec![vec![[ninf; 3]; m + 1]; n + 1];

    let into = |cell: &[T; 3], to: usize| {
        log_sum_exp3(
            cell[0] + lpi[0][to],
            cell[1] + lpi[1][to],
            cell[2] + lpi[2][to],
        )
    };
    for i in 0..=n {
        for j in 0..=m {
            if i >= 1 {
                let prior = if (i, j) == (1, 0) { lmu[0] } else { into(&f[i - 1][j], 0) };
                f[i][j][0] = prior + ln_prob(em.f(x[i - 1]));
            }
            if j >= 1 {
                let prior = if (i, j) == (0, 1) { lmu[1] } else { into(&f[i][j - 1], 1) };
                f[i][j][1] = prior + ln_prob(em.g(y[j - 1]));
            }
            if i >= 1 && j >= 1 {
                let prior = if (i, j) == (1, 1) { lmu[2] } else { into(&f[i - 1][j - 1], 2) };
                f[i][j][2] = prior + ln_prob(em.h(x[i - 1], y[j - 1]));
            }
        }
    }
    let last = f[n][m];
    Ok(LogLikResult {
        value: log_sum_exp3(last[0], last[1], last[2]),
        criterion: Criterion::Q,
        endpoint: (n, m),
        t: None,
    })
}
