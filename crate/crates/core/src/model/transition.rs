use crate::error::{Error, Result};
use crate::model::HiddenState;
use crate::scalar::Real;

/// Row-stochastic 3x3 matrix over `(H, V, D)`; `entries[from][to]`.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionMatrix<T: Real = f64> {
    entries: [[T; 3]; 3],
}

impl<T: Real> TransitionMatrix<T> {
    pub fn new(entries: [[T; 3]; 3]) -> Result<Self> {
        for (r, row) in entries.iter().enumerate() {
            let label = HiddenState::from_index(r);
            for &p in row {
                if !(p >= T::zero()) || !p.is_finite() {
                    return Err(Error::invalid_prob(
                        "pi",
                        format!("row {label} has entry {p} outside [0, 1]"),
                    ));
                }
            }
            let s: f64 = row.iter().map(|p| p.f64()).sum();
            if (s - 1.0).abs() > T::SIMPLEX_TOL {
                return Err(Error::invalid_prob(
                    "pi",
                    format!("row {label} sums to {s}"),
                ));
            }
        }
        Ok(TransitionMatrix { entries })
    }

    /// Every row equal to `row`: the hidden chain is i.i.d. and `row` is stationary.
    pub fn iid(row: [T; 3]) -> Result<Self> {
        Self::new([row; 3])
    }

    #[inline]
    pub fn get(&self, from: HiddenState, to: HiddenState) -> T {
        self.entries[from.index()][to.index()]
    }

    #[inline]
    pub fn entries(&self) -> &[[T; 3]; 3] {
        &self.entries
    }

    pub fn mirrored(&self) -> Self {
        let mut e = [[T::zero(); 3]; 3];
        for a in HiddenState::ALL {
            for b in HiddenState::ALL {
                e[a.mirrored().index()][b.mirrored().index()] = self.get(a, b);
            }
        }
        TransitionMatrix { entries: e }
    }

    pub fn cast<U: Real>(&self) -> TransitionMatrix<U> {
        TransitionMatrix {
            entries: self.entries.map(|row| row.map(|p| U::c(p.f64()))),
        }
    }

    pub fn stationary(&self) -> Result<[T; 3]> {
        stationary_distribution(self)
    }
}

/// Solves `mu (pi - I) = 0`, `sum(mu) = 1` by Gaussian elimination with partial
/// pivoting. The last balance equation is replaced by the normalization.
pub fn stationary_distribution<T: Real>(pi: &TransitionMatrix<T>) -> Result<[T; 3]> {
    let e = pi.entries();
    // Row k of the system: sum_i mu_i (pi[i][k] - delta_ik) = 0 for k = 0, 1.
    let mut a = [[T::zero(); 4]; 3];
    for k in 0..2 {
        for i in 0..3 {
            a[k][i] = e[i][k] - if i == k { T::one() } else { T::zero() };
        }
    }
    a[2] = [T::one(), T::one(), T::one(), T::one()];

    for col in 0..3 {
        let pivot = (col..3)
            .max_by(|&r, &s| a[r][col].abs().partial_cmp(&a[s][col].abs()).unwrap())
            .unwrap();
        if a[pivot][col].abs() <= T::c(1e3) * T::epsilon() {
            return Err(Error::NonIrreducible);
        }
        a.swap(col, pivot);
        for r in 0..3 {
            if r != col {
                let factor = a[r][col] / a[col][col];
                for c in col..4 {
                    a[r][c] = a[r][c] - factor * a[col][c];
                }
            }
        }
    }
    let mut mu = [T::zero(); 3];
    for i in 0..3 {
        mu[i] = a[i][3] / a[i][i];
        if !(mu[i] >= T::zero()) {
            if mu[i] > -T::c(T::STATIONARY_TOL) {
                mu[i] = T::zero();
            } else {
                return Err(Error::NonIrreducible);
            }
        }
    }
    let s: T = mu.iter().copied().sum();
    Ok(mu.map(|m| m / s))
}
