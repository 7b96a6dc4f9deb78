//! Maps between unconstrained optimizer coordinates and scheme values.
//!
//! Probabilities go through a logistic map onto an open interval; the rate
//! goes through a logistic map in log space onto `[alpha_min, alpha_max]`.

use crate::model::ParamName;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Coordinate {
    pub name: ParamName,
    pub lo: f64,
    pub hi: f64,
    /// Interpolate between `ln lo` and `ln hi` instead of `lo` and `hi`.
    pub log_scale: bool,
}

fn sigmoid(u: f64) -> f64 {
    if u >= 0.0 {
        1.0 / (1.0 + (-u).exp())
    } else {
        let e = u.exp();
        e / (1.0 + e)
    }
}

fn logit(s: f64) -> f64 {
    (s / (1.0 - s)).ln()
}

impl Coordinate {
    /// Box for `name` given the probability floor and the rate bounds.
    pub fn for_param(name: ParamName, delta: f64, alpha_bounds: (f64, f64)) -> Self {
        let (lo, hi, log_scale) = match name {
            ParamName::Alpha => (alpha_bounds.0, alpha_bounds.1, true),
            // p and 1 - 2p both at least delta.
            ParamName::P => (delta, (1.0 - delta) / 2.0, false),
            // Each row holds three entries of at least delta.
            _ => (delta, 1.0 - 2.0 * delta, false),
        };
        Coordinate {
            name,
            lo,
            hi,
            log_scale,
        }
    }

    /// Position in the box, in `(0, 1)`.
    pub fn fraction(&self, value: f64) -> f64 {
        if self.log_scale {
            (value.ln() - self.lo.ln()) / (self.hi.ln() - self.lo.ln())
        } else {
            (value - self.lo) / (self.hi - self.lo)
        }
    }

    pub fn from_fraction(&self, s: f64) -> f64 {
        if self.log_scale {
            (self.lo.ln() + s * (self.hi.ln() - self.lo.ln())).exp()
        } else {
            self.lo + s * (self.hi - self.lo)
        }
    }

    pub fn to_value(&self, u: f64) -> f64 {
        self.from_fraction(sigmoid(u))
    }

    /// Inverse of [`Coordinate::to_value`]; infinite at the box edges.
    pub fn to_unconstrained(&self, value: f64) -> f64 {
        logit(self.fraction(value))
    }
}
