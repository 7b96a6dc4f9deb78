//! Floating-point abstraction used by the model and the dynamic-programming engines.
//!
//! Everything numerical is generic over [`Real`], implemented for `f32` and `f64`.
//! Beyond `num_traits::Float` the engines need exact power-of-two scaling, which
//! is what keeps the linear-domain recursions free of underflow.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

pub trait Real:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Tolerance for "sums to one" checks on probability tables.
    const SIMPLEX_TOL: f64;
    /// Tolerance for the stationarity check `mu * pi = mu`.
    const STATIONARY_TOL: f64;
    /// Extended-range cells are rescaled once their largest entry leaves
    /// `[2^-RENORM_SPAN, 2^RENORM_SPAN]`. Wide enough that neighbouring cells
    /// usually share an exponent, narrow enough that a cell's minor entries
    /// stay far above the underflow threshold.
    const RENORM_SPAN: i32;

    /// `2^k`, exact. Returns zero below the subnormal range and infinity above the
    /// largest exponent.
    fn exp2i(k: i32) -> Self;

    /// `floor(log2(x))` for positive finite `x` (subnormals included).
    fn ilog2(self) -> i32;

    /// Lossless-enough conversion from `f64` constants.
    #[inline]
    fn c(v: f64) -> Self {
        Self::from_f64(v).expect("f64 constant representable")
    }

    #[inline]
    fn f64(self) -> f64 {
        self.to_f64().expect("finite conversion to f64")
    }
}

impl Real for f64 {
    const SIMPLEX_TOL: f64 = 1e-12;
    const STATIONARY_TOL: f64 = 1e-10;
    const RENORM_SPAN: i32 = 512;

    #[inline]
    fn exp2i(k: i32) -> f64 {
        if k > 1023 {
            f64::INFINITY
        } else if k >= -1022 {
            f64::from_bits(((k + 1023) as u64) << 52)
        } else if k >= -1074 {
            f64::from_bits(1u64 << (k + 1074))
        } else {
            0.0
        }
    }

    #[inline]
    fn ilog2(self) -> i32 {
        let bits = self.to_bits();
        let biased = ((bits >> 52) & 0x7ff) as i32;
        if biased == 0 {
            let mantissa = bits & ((1u64 << 52) - 1);
            -1011 - mantissa.leading_zeros() as i32
        } else {
            biased - 1023
        }
    }
}

impl Real for f32 {
    const SIMPLEX_TOL: f64 = 2e-6;
    const STATIONARY_TOL: f64 = 2e-5;
    const RENORM_SPAN: i32 = 32;

    #[inline]
    fn exp2i(k: i32) -> f32 {
        if k > 127 {
            f32::INFINITY
        } else if k >= -126 {
            f32::from_bits(((k + 127) as u32) << 23)
        } else if k >= -149 {
            f32::from_bits(1u32 << (k + 149))
        } else {
            0.0
        }
    }

    #[inline]
    fn ilog2(self) -> i32 {
        let bits = self.to_bits();
        let biased = ((bits >> 23) & 0xff) as i32;
        if biased == 0 {
            let mantissa = bits & ((1u32 << 23) - 1);
            -118 - mantissa.leading_zeros() as i32
        } else {
            biased - 127
        }
    }
}

/// `ln(e^a + e^b)` with the usual max shift; `-inf` is the additive identity.
#[inline]
pub fn log_add<T: Real>(a: T, b: T) -> T {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == T::neg_infinity() {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// Max-shifted log-sum-exp over exactly three terms.
#[inline]
pub fn log_sum_exp3<T: Real>(a: T, b: T, c: T) -> T {
    let m = a.max(b).max(c);
    if m == T::neg_infinity() {
        return m;
    }
    m + ((a - m).exp() + (b - m).exp() + (c - m).exp()).ln()
}

/// Max-shifted log-sum-exp over a slice. Empty input gives `-inf`.
pub fn log_sum_exp<T: Real>(values: &[T]) -> T {
    let m = values.iter().copied().fold(T::neg_infinity(), T::max);
    if m == T::neg_infinity() || m == T::infinity() {
        return m;
    }
    m + values.iter().map(|&v| (v - m).exp()).sum::<T>().ln()
}

/// Natural log of a probability; exact zero maps to `-inf`.
#[inline]
pub fn ln_prob<T: Real>(p: T) -> T {
    if p > T::zero() {
        p.ln()
    } else {
        T::neg_infinity()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp2i_matches_powi() {
        for k in -1074..=1023 {
            assert_eq!(f64::exp2i(k), (k as f64).exp2(), "k = {k}");
        }
        for k in -149..=127 {
            assert_eq!(f32::exp2i(k), (k as f32).exp2(), "k = {k}");
        }
        assert_eq!(f64::exp2i(-1075), 0.0);
        assert_eq!(f32::exp2i(128), f32::INFINITY);
    }

    #[test]
    fn ilog2_inverts_exp2i() {
        for k in -1074..=1023 {
            assert_eq!(f64::exp2i(k).ilog2(), k);
            if k > -1073 {
                assert_eq!((f64::exp2i(k) * 1.5).ilog2(), k);
            }
        }
        for k in -149..=127 {
            assert_eq!(f32::exp2i(k).ilog2(), k);
        }
        assert_eq!(0.3f64.ilog2(), -2);
    }

    #[test]
    fn log_sum_exp_handles_infinities() {
        let ninf = f64::NEG_INFINITY;
        assert_eq!(log_sum_exp3(ninf, ninf, ninf), ninf);
        assert!((log_sum_exp3(0.0, ninf, ninf)).abs() < 1e-15);
        assert!((log_add(-1000.0, -1000.0) - (-1000.0 + 2f64.ln())).abs() < 1e-12);
        assert_eq!(log_sum_exp::<f64>(&[]), ninf);
        let v = [0.1f64.ln(), 0.2f64.ln(), 0.3f64.ln()];
        assert!((log_sum_exp(&v) - 0.6f64.ln()).abs() < 1e-15);
    }
}
