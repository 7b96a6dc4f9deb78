use crate::alphabet::Symbol;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Emission laws: `f` for horizontal steps, `g` for vertical steps and the joint
/// law `h` (row-major, `h[a * k + b]`) for diagonal steps.
#[derive(Clone, Debug, PartialEq)]
pub struct EmissionTables<T: Real = f64> {
    f: Vec<T>,
    g: Vec<T>,
    h: Vec<T>,
}

fn check_simplex<T: Real>(what: &str, p: &[T]) -> Result<()> {
    if p.is_empty() {
        return Err(Error::invalid_prob(what, "empty"));
    }
    if let Some(bad) = p.iter().find(|v| !(**v >= T::zero()) || !v.is_finite()) {
        return Err(Error::invalid_prob(what, format!("entry {bad} outside [0, 1]")));
    }
    let s: f64 = p.iter().map(|v| v.f64()).sum();
    if (s - 1.0).abs() > T::SIMPLEX_TOL {
        return Err(Error::invalid_prob(what, format!("sums to {s}")));
    }
    Ok(())
}

impl<T: Real> EmissionTables<T> {
    pub fn new(f: Vec<T>, g: Vec<T>, h: Vec<T>) -> Result<Self> {
        check_simplex("f", &f)?;
        check_simplex("g", &g)?;
        check_simplex("h", &h)?;
        let k = f.len();
        if g.len() != k || h.len() != k * k {
            return Err(Error::invalid_prob(
                "h",
                format!(
                    "shape mismatch: |f| = {k}, |g| = {}, |h| = {} (expected {})",
                    g.len(),
                    h.len(),
                    k * k
                ),
            ));
        }
        Ok(EmissionTables { f, g, h })
    }

    /// Alphabet size.
    #[inline]
    pub fn size(&self) -> usize {
        self.f.len()
    }

    #[inline]
    pub fn f(&self, a: Symbol) -> T {
        self.f[a as usize]
    }

    #[inline]
    pub fn g(&self, b: Symbol) -> T {
        self.g[b as usize]
    }

    #[inline]
    pub fn h(&self, a: Symbol, b: Symbol) -> T {
        self.h[a as usize * self.f.len() + b as usize]
    }

    pub fn f_table(&self) -> &[T] {
        &self.f
    }

    pub fn g_table(&self) -> &[T] {
        &self.g
    }

    /// Row-major joint table.
    pub fn h_table(&self) -> &[T] {
        &self.h
    }

    /// First-coordinate marginal of `h`.
    pub fn h_x(&self) -> Vec<T> {
        let k = self.size();
        (0..k).map(|a| self.h[a * k..(a + 1) * k].iter().copied().sum()).collect()
    }

    /// Second-coordinate marginal of `h`.
    pub fn h_y(&self) -> Vec<T> {
        let k = self.size();
        (0..k).map(|b| (0..k).map(|a| self.h[a * k + b]).sum()).collect()
    }

    /// Tables for the model with the two sequences exchanged.
    pub fn mirrored(&self) -> Self {
        let k = self.size();
        let mut h = vec![T::zero(); k * k];
        for a in 0..k {
            for b in 0..k {
                h[b * k + a] = self.h[a * k + b];
            }
        }
        EmissionTables {
            f: self.g.clone(),
            g: self.f.clone(),
            h,
        }
    }

    pub fn cast<U: Real>(&self) -> EmissionTables<U> {
        let c = |v: &[T]| v.iter().map(|p| U::c(p.f64())).collect();
        EmissionTables {
            f: c(&self.f),
            g: c(&self.g),
            h: c(&self.h),
        }
    }

    pub(crate) fn min_entry(&self) -> (String, T) {
        let mut best = ("f".to_string(), T::infinity());
        for (name, table) in [("f", &self.f), ("g", &self.g), ("h", &self.h)] {
            for (i, &v) in table.iter().enumerate() {
                if v < best.1 {
                    best = (format!("{name}[{i}]"), v);
                }
            }
        }
        best
    }
}

/// Joint law of an aligned pair under a single substitution rate:
/// with probability `1 - e^-alpha` the second letter is redrawn from `f`,
/// otherwise it is copied. Both marginals of `h` equal `f` and `g = f`.
pub fn substitution_emissions<T: Real>(f: &[T], alpha: T) -> Result<EmissionTables<T>> {
    if !(alpha > T::zero()) || !alpha.is_finite() {
        return Err(Error::InvalidRate(alpha.f64()));
    }
    check_simplex("f", f)?;
    let k = f.len();
    let keep = (-alpha).exp();
    let redraw = -(-alpha).exp_m1();
    let mut h = vec![T::zero(); k * k];
    for a in 0..k {
        for b in 0..k {
            h[a * k + b] = if a == b {
                f[a] * (redraw * f[a] + keep)
            } else {
                f[a] * redraw * f[b]
            };
        }
    }
    // The simplex check on h is implied by the construction; skip it so that
    // rounding at tiny alpha cannot reject a valid table.
    Ok(EmissionTables {
        f: f.to_vec(),
        g: f.to_vec(),
        h,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const UNIFORM: [f64; 4] = [0.25; 4];

    #[test]
    fn uniform_table_values() {
        let e = substitution_emissions(&UNIFORM, 0.05).unwrap();
        // Direct evaluation: e^-0.05 = 0.951229424500714..., 1 - e^-0.05 = 0.048770575499286...
        let keep = 0.951_229_424_500_714_f64;
        let redraw = 1.0 - keep;
        let off = 0.25 * redraw * 0.25;
        let diag = 0.25 * (redraw * 0.25 + keep);
        assert!((off - 0.003_048_160_97).abs() < 1e-11);
        assert!((diag - 0.240_855_517_09).abs() < 1e-11);
        for a in 0..4u8 {
            for b in 0..4u8 {
                let want = if a == b { diag } else { off };
                assert!((e.h(a, b) - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn marginals_equal_f() {
        let f: [f64; 4] = [0.1, 0.2, 0.3, 0.4];
        for alpha in [1e-3, 0.05, 1.0, 7.0] {
            let e = substitution_emissions(&f, alpha).unwrap();
            for (a, (hx, hy)) in e.h_x().iter().zip(e.h_y()).enumerate() {
                assert!((hx - f[a]).abs() < 1e-15);
                assert!((hy - f[a]).abs() < 1e-15);
            }
            assert_eq!(e.g_table(), &f);
        }
    }

    #[test]
    fn large_rate_gives_independence() {
        let f: [f64; 4] = [0.1, 0.2, 0.3, 0.4];
        let e = substitution_emissions(&f, 50.0).unwrap();
        for a in 0..4u8 {
            for b in 0..4u8 {
                assert!((e.h(a, b) - f[a as usize] * f[b as usize]).abs() < 1e-20);
            }
        }
    }

    #[test]
    fn vanishing_rate_copies_the_letter() {
        // e^-alpha rounds to exactly 1, so h(x, y) = f(x) 1{x = y}.
        let e = substitution_emissions(&UNIFORM, 1e-300).unwrap();
        for a in 0..4u8 {
            for b in 0..4u8 {
                let want = if a == b { 0.25 } else { 0.0 };
                assert!((e.h(a, b) - want).abs() < 1e-290);
            }
        }
    }

    #[test]
    fn non_positive_rate_is_rejected() {
        assert_eq!(substitution_emissions(&UNIFORM, 0.0), Err(Error::InvalidRate(0.0)));
        assert!(substitution_emissions(&UNIFORM, -1.0).is_err());
        assert!(substitution_emissions(&UNIFORM, f64::NAN).is_err());
    }

    #[test]
    fn table_validation() {
        assert!(EmissionTables::new(vec![0.5, 0.5], vec![0.5, 0.5], vec![0.25; 4]).is_ok());
        assert!(EmissionTables::new(vec![0.5, 0.5], vec![0.5, 0.5], vec![0.25; 3]).is_err());
        assert!(EmissionTables::new(vec![0.6, 0.5], vec![0.5, 0.5], vec![0.25; 4]).is_err());
        assert!(EmissionTables::new(vec![1.5, -0.5], vec![0.5, 0.5], vec![0.25; 4]).is_err());
    }

    #[test]
    fn mirrored_transposes_h() {
        let e = EmissionTables::<f64>::new(
            vec![0.5, 0.5],
            vec![0.3, 0.7],
            vec![0.1, 0.2, 0.3, 0.4],
        )
        .unwrap();
        let m = e.mirrored();
        assert_eq!(m.f_table(), &[0.3, 0.7]);
        assert_eq!(m.h(0, 1), 0.3);
        assert_eq!(m.h(1, 0), 0.2);
    }
}
