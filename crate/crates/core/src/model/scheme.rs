use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::alphabet::Alphabet;
use crate::error::{Error, Result};
use crate::model::{
    stationary_distribution, substitution_emissions, HiddenState, ModelParams, ParamFloor,
    TransitionMatrix,
};
use crate::scalar::Real;

/// Named coordinates of the reduced parametrizations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ParamName {
    #[serde(rename = "p")]
    P,
    #[serde(rename = "alpha")]
    Alpha,
    #[serde(rename = "pi_HH")]
    PiHH,
    #[serde(rename = "pi_HV")]
    PiHV,
    #[serde(rename = "pi_DV")]
    PiDV,
    #[serde(rename = "pi_VV")]
    PiVV,
    #[serde(rename = "pi_DH")]
    PiDH,
}

impl ParamName {
    pub fn as_str(self) -> &'static str {
        match self {
            ParamName::P => "p",
            ParamName::Alpha => "alpha",
            ParamName::PiHH => "pi_HH",
            ParamName::PiHV => "pi_HV",
            ParamName::PiDV => "pi_DV",
            ParamName::PiVV => "pi_VV",
            ParamName::PiDH => "pi_DH",
        }
    }

    /// Rates live on `(0, inf)`; everything else is a probability.
    pub fn is_rate(self) -> bool {
        self == ParamName::Alpha
    }
}

impl fmt::Display for ParamName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ParamName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "p" => ParamName::P,
            "alpha" => ParamName::Alpha,
            "pi_HH" => ParamName::PiHH,
            "pi_HV" => ParamName::PiHV,
            "pi_DV" => ParamName::PiDV,
            "pi_VV" => ParamName::PiVV,
            "pi_DH" => ParamName::PiDH,
            _ => return Err(Error::InvalidParameter(format!("unknown parameter `{s}`"))),
        })
    }
}

/// The five free transition probabilities of the constrained Markov scheme.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarkovFree {
    pub pi_hh: f64,
    pub pi_hv: f64,
    pub pi_dv: f64,
    pub pi_vv: f64,
    pub pi_dh: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SchemeVariant {
    /// i.i.d. hidden steps with `P(H) = P(V) = p`, `P(D) = 1 - 2p`.
    Iid { p: f64, alpha: f64 },
    /// Markov hidden chain with five free transitions; the rest follow from
    /// row-stochasticity and equal insertion/deletion frequencies.
    ConstrainedMarkov { free: MarkovFree, alpha: f64 },
    /// A full parameter passed through unchanged.
    Raw(ModelParams<f64>),
}

/// A continuous map from a low-dimensional parameter to a full model, built on
/// the single-rate substitution law with a known equilibrium letter law.
#[derive(Clone, Debug, PartialEq)]
pub struct ParametrizationScheme {
    pub variant: SchemeVariant,
    pub alphabet: Alphabet,
    /// Equilibrium letter law; fixed, never estimated.
    pub base_f: Vec<f64>,
}

const IID_NAMES: [ParamName; 2] = [ParamName::P, ParamName::Alpha];
const MARKOV_NAMES: [ParamName; 6] = [
    ParamName::PiHH,
    ParamName::PiHV,
    ParamName::PiDV,
    ParamName::PiVV,
    ParamName::PiDH,
    ParamName::Alpha,
];

impl ParametrizationScheme {
    pub fn iid(p: f64, alpha: f64, alphabet: Alphabet, base_f: Vec<f64>) -> Result<Self> {
        let s = ParametrizationScheme {
            variant: SchemeVariant::Iid { p, alpha },
            alphabet,
            base_f,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn constrained_markov(
        free: MarkovFree,
        alpha: f64,
        alphabet: Alphabet,
        base_f: Vec<f64>,
    ) -> Result<Self> {
        let s = ParametrizationScheme {
            variant: SchemeVariant::ConstrainedMarkov { free, alpha },
            alphabet,
            base_f,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn raw(theta: ModelParams<f64>) -> Self {
        ParametrizationScheme {
            alphabet: theta.alphabet().clone(),
            base_f: theta.emissions().f_table().to_vec(),
            variant: SchemeVariant::Raw(theta),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self.variant {
            SchemeVariant::Iid { .. } => "iid",
            SchemeVariant::ConstrainedMarkov { .. } => "markov",
            SchemeVariant::Raw(_) => "raw",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        let check_alpha = |alpha: f64| {
            if alpha > 0.0 && alpha.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidRate(alpha))
            }
        };
        if self.base_f.len() != self.alphabet.size() {
            return bad(format!(
                "equilibrium law has {} entries for an alphabet of {}",
                self.base_f.len(),
                self.alphabet.size()
            ));
        }
        match &self.variant {
            SchemeVariant::Iid { p, alpha } => {
                if !(*p > 0.0 && *p < 0.5) {
                    return bad(format!("p = {p} outside (0, 1/2)"));
                }
                check_alpha(*alpha)
            }
            SchemeVariant::ConstrainedMarkov { free, alpha } => {
                for (name, v) in [
                    ("pi_HH", free.pi_hh),
                    ("pi_HV", free.pi_hv),
                    ("pi_DV", free.pi_dv),
                    ("pi_VV", free.pi_vv),
                    ("pi_DH", free.pi_dh),
                ] {
                    if !(v > 0.0 && v < 1.0) {
                        return bad(format!("{name} = {v} outside (0, 1)"));
                    }
                }
                if free.pi_hh + free.pi_hv >= 1.0 {
                    return bad("pi_HH + pi_HV must be < 1".into());
                }
                if free.pi_dh + free.pi_dv >= 1.0 {
                    return bad("pi_DH + pi_DV must be < 1".into());
                }
                check_alpha(*alpha)
            }
            SchemeVariant::Raw(_) => Ok(()),
        }
    }

    /// Coordinates of this scheme, in canonical order.
    pub fn names(&self) -> &'static [ParamName] {
        match self.variant {
            SchemeVariant::Iid { .. } => &IID_NAMES,
            SchemeVariant::ConstrainedMarkov { .. } => &MARKOV_NAMES,
            SchemeVariant::Raw(_) => &[],
        }
    }

    pub fn get(&self, name: ParamName) -> Option<f64> {
        match (&self.variant, name) {
            (SchemeVariant::Iid { p, .. }, ParamName::P) => Some(*p),
            (SchemeVariant::Iid { alpha, .. }, ParamName::Alpha) => Some(*alpha),
            (SchemeVariant::ConstrainedMarkov { alpha, .. }, ParamName::Alpha) => Some(*alpha),
            (SchemeVariant::ConstrainedMarkov { free, .. }, n) => match n {
                ParamName::PiHH => Some(free.pi_hh),
                ParamName::PiHV => Some(free.pi_hv),
                ParamName::PiDV => Some(free.pi_dv),
                ParamName::PiVV => Some(free.pi_vv),
                ParamName::PiDH => Some(free.pi_dh),
                _ => None,
            },
            _ => None,
        }
    }

    /// Sets one coordinate without validating the result.
    pub fn set(&mut self, name: ParamName, value: f64) -> Result<()> {
        let slot = match (&mut self.variant, name) {
            (SchemeVariant::Iid { p, .. }, ParamName::P) => p,
            (SchemeVariant::Iid { alpha, .. }, ParamName::Alpha) => alpha,
            (SchemeVariant::ConstrainedMarkov { alpha, .. }, ParamName::Alpha) => alpha,
            (SchemeVariant::ConstrainedMarkov { free, .. }, n) => match n {
                ParamName::PiHH => &mut free.pi_hh,
                ParamName::PiHV => &mut free.pi_hv,
                ParamName::PiDV => &mut free.pi_dv,
                ParamName::PiVV => &mut free.pi_vv,
                ParamName::PiDH => &mut free.pi_dh,
                _ => {
                    return Err(Error::InvalidParameter(format!(
                        "`{name}` is not a coordinate of the markov scheme"
                    )))
                }
            },
            (_, n) => {
                return Err(Error::InvalidParameter(format!(
                    "`{n}` is not a coordinate of the {} scheme",
                    self.kind()
                )))
            }
        };
        *slot = value;
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        self.names().iter().map(|&n| self.get(n).unwrap()).collect()
    }

    pub fn with(&self, assignments: &[(ParamName, f64)]) -> Result<Self> {
        let mut s = self.clone();
        for &(n, v) in assignments {
            s.set(n, v)?;
        }
        Ok(s)
    }

    /// The full model `theta(beta)`.
    pub fn theta<T: Real>(&self) -> Result<ModelParams<T>> {
        theta_from_beta(self, None)
    }
}

/// Maps scheme coordinates to the full model, optionally enforcing a floor.
pub fn theta_from_beta<T: Real>(
    scheme: &ParametrizationScheme,
    floor: Option<ParamFloor>,
) -> Result<ModelParams<T>> {
    scheme.validate()?;
    let f: Vec<T> = scheme.base_f.iter().map(|&v| T::c(v)).collect();
    let theta = match &scheme.variant {
        SchemeVariant::Iid { p, alpha } => {
            let p = T::c(*p);
            let pi = TransitionMatrix::iid([p, p, T::one() - p - p])?;
            ModelParams::new(
                scheme.alphabet.clone(),
                pi,
                substitution_emissions(&f, T::c(*alpha))?,
            )?
        }
        SchemeVariant::ConstrainedMarkov { free, alpha } => {
            let pi = constrained_markov_matrix::<T>(free)?;
            ModelParams::new(
                scheme.alphabet.clone(),
                pi,
                substitution_emissions(&f, T::c(*alpha))?,
            )?
        }
        SchemeVariant::Raw(theta) => theta.cast()?,
    };
    if let Some(floor) = floor {
        floor.check(&theta)?;
    }
    Ok(theta)
}

const ROOT_TOL: f64 = 1e-12;

fn markov_rows(free: &MarkovFree, pi_vh: f64) -> [[f64; 3]; 3] {
    [
        [free.pi_hh, free.pi_hv, 1.0 - free.pi_hh - free.pi_hv],
        [pi_vh, free.pi_vv, 1.0 - free.pi_vv - pi_vh],
        [free.pi_dh, free.pi_dv, 1.0 - free.pi_dh - free.pi_dv],
    ]
}

fn insertion_deletion_gap(free: &MarkovFree, pi_vh: f64) -> Result<f64> {
    let pi = TransitionMatrix::new(markov_rows(free, pi_vh))?;
    let mu = stationary_distribution(&pi)?;
    Ok(mu[HiddenState::H.index()] - mu[HiddenState::V.index()])
}

/// Completes the five free entries into a full matrix with `mu_H = mu_V`, solving
/// for `pi_VH` in `(0, 1 - pi_VV)` by bisection.
pub fn constrained_markov_matrix<T: Real>(free: &MarkovFree) -> Result<TransitionMatrix<T>> {
    let (mut lo, mut hi) = (0.0, 1.0 - free.pi_vv);
    let mut g_lo = insertion_deletion_gap(free, lo).map_err(|_| Error::NoStationarySolution)?;
    let g_hi = insertion_deletion_gap(free, hi).map_err(|_| Error::NoStationarySolution)?;
    if g_lo == 0.0 || g_hi == 0.0 || g_lo.signum() == g_hi.signum() {
        return Err(Error::NoStationarySolution);
    }
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        let g = insertion_deletion_gap(free, mid)?;
        if g.abs() <= ROOT_TOL || hi - lo <= f64::EPSILON * hi {
            break;
        }
        if g.signum() == g_lo.signum() {
            lo = mid;
            g_lo = g;
        } else {
            hi = mid;
        }
    }
    let rows = markov_rows(free, mid);
    TransitionMatrix::new(rows.map(|r| r.map(T::c)))
}
