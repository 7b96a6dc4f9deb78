//! Extended-range cells: three per-state values sharing one binary exponent.
//!
//! A cell represents `v[e] * 2^exp`. Every recursion step multiplies by
//! probabilities, so values drift toward zero; cells are renormalized into
//! `[2^-s, 2^s]` (`s = Real::RENORM_SPAN`) with exact power-of-two factors,
//! which keeps the linear-domain recursions free of underflow at any sequence
//! length without calling `exp`/`ln` per cell.

use crate::scalar::Real;

/// Exponent used for cells that are exactly zero.
pub(crate) const ZERO_EXP: i32 = i32::MIN / 4;

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Cell<T> {
    pub v: [T; 3],
    pub e: i32,
}

impl<T: Real> Cell<T> {
    #[inline]
    pub fn zero() -> Self {
        Cell {
            v: [T::zero(); 3],
            e: ZERO_EXP,
        }
    }

    #[inline]
    pub fn new(v: [T; 3], e: i32) -> Self {
        let mut c = Cell { v, e };
        c.normalize();
        c
    }

    /// Builds a cell from three state values carried at their own exponents.
    #[inline]
    pub fn assemble(h: T, eh: i32, v: T, ev: i32, d: T, ed: i32) -> Self {
        if eh == ev && ev == ed {
            let mut c = Cell { v: [h, v, d], e: eh };
            c.normalize();
            return c;
        }
        let e = eh.max(ev).max(ed);
        let mut c = Cell {
            v: [
                h * T::exp2i(eh - e),
                v * T::exp2i(ev - e),
                d * T::exp2i(ed - e),
            ],
            e,
        };
        c.normalize();
        c
    }

    #[inline]
    pub fn normalize(&mut self) {
        let mx = self.v[0].max(self.v[1]).max(self.v[2]);
        if mx == T::zero() {
            self.e = ZERO_EXP;
            return;
        }
        if mx < T::exp2i(-T::RENORM_SPAN) || mx > T::exp2i(T::RENORM_SPAN) {
            let k = mx.ilog2();
            let s = T::exp2i(-k);
            for x in self.v.iter_mut() {
                *x = *x * s;
            }
            self.e += k;
        }
    }

    /// `sum_e' v[e'] * col[e']`, i.e. the mass flowing into one state.
    #[inline]
    pub fn dot(&self, col: &[T; 3]) -> T {
        self.v[0] * col[0] + self.v[1] * col[1] + self.v[2] * col[2]
    }

    #[inline]
    pub fn ln_total(&self) -> T {
        let s = self.v[0] + self.v[1] + self.v[2];
        ln_scaled(s, self.e)
    }
}

#[inline]
fn ln_scaled<T: Real>(s: T, e: i32) -> T {
    if s > T::zero() {
        s.ln() + T::c(e as f64 * std::f64::consts::LN_2)
    } else {
        T::neg_infinity()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn assemble_aligns_exponents() {
        let c = Cell::<f64>::assemble(1.0, 0, 1.0, -1, 1.0, -2000);
        assert_eq!(c.e, 0);
        assert_eq!(c.v, [1.0, 0.5, 0.0]);
        assert!((c.ln_total() - 1.5f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn normalization_keeps_value() {
        let c = Cell::<f64>::new([1e-200, 2e-200, 0.0], 10);
        assert!(c.v[1] >= 1.0 && c.v[1] < 2.0);
        let want = (3e-200f64).ln() + 10.0 * std::f64::consts::LN_2;
        assert!((c.ln_total() - want).abs() < 1e-12);
    }

    #[test]
    fn zero_cells() {
        let z = Cell::<f64>::new([0.0; 3], 5);
        assert_eq!(z.e, ZERO_EXP);
        assert_eq!(z.ln_total(), f64::NEG_INFINITY);
        let c = Cell::<f64>::assemble(0.0, ZERO_EXP, 0.5, 3, 0.0, ZERO_EXP);
        assert_eq!(c.e, 3);
        assert_eq!(c.v, [0.0, 0.5, 0.0]);
    }

    #[test]
    fn extreme_range_in_f32() {
        // 1e-300 is far below f32 range; the exponent carries it.
        let mut c = Cell::<f32>::new([1.0, 0.0, 0.0], -997);
        for _ in 0..10 {
            c = Cell::assemble(c.v[0] * 0.001, c.e, 0.0, ZERO_EXP, 0.0, ZERO_EXP);
        }
        let want = -997.0 * std::f64::consts::LN_2 + 10.0 * 0.001f64.ln();
        assert!((c.ln_total() as f64 - want).abs() < 1e-3);
    }
}
