//! Model files: a TOML document with either the full tables (`[pi]`, `[f]`,
//! `[g]`, `[h]`) or a reduced parametrization (`[scheme]`).
//!
//! ```toml
//! alphabet = "ACGT"
//!
//! [pi]        # rows in (H, V, D) order, columns likewise
//! H = [0.5, 0.2, 0.3]
//! V = [0.1, 0.6, 0.3]
//! D = [0.2, 0.1, 0.7]
//!
//! [f]
//! probs = [0.25, 0.25, 0.25, 0.25]
//!
//! [g]
//! probs = [0.25, 0.25, 0.25, 0.25]
//!
//! [h]         # rows indexed by the x symbol
//! rows = [[0.24, 0.003, 0.003, 0.004], ...]
//! ```
//!
//! or
//!
//! ```toml
//! alphabet = "ACGT"
//!
//! [scheme]
//! kind = "iid"            # or "markov"
//! p = 0.25
//! alpha = 0.05
//! f = [0.25, 0.25, 0.25, 0.25]
//! ```

use serde::{Deserialize, Serialize};

use crate::alphabet::Alphabet;
use crate::error::{Error, Result};
use crate::model::{
    EmissionTables, MarkovFree, ModelParams, ParametrizationScheme, SchemeVariant,
    TransitionMatrix,
};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    #[serde(default)]
    alphabet: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pi: Option<PiSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    f: Option<ProbSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    g: Option<ProbSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    h: Option<JointSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    scheme: Option<SchemeSection>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
struct PiSection {
    H: [f64; 3],
    V: [f64; 3],
    D: [f64; 3],
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProbSection {
    probs: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JointSection {
    rows: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
struct SchemeSection {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p: Option<f64>,
    alpha: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pi_HH: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pi_HV: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pi_DV: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pi_VV: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pi_DH: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    f: Option<Vec<f64>>,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn structural(message: impl Into<String>) -> Error {
    Error::Parse {
        line: 0,
        message: message.into(),
    }
}

/// Parses a model file. Full tables come back as a `Raw` scheme.
pub fn parse_model(text: &str) -> Result<ParametrizationScheme> {
    let file: ModelFile = toml::from_str(text).map_err(|e| Error::Parse {
        line: e.span().map(|s| line_of(text, s.start)).unwrap_or(0),
        message: e.message().to_string(),
    })?;
    let alphabet = match &file.alphabet {
        Some(a) => Alphabet::new(a.chars())?,
        None => Alphabet::dna(),
    };
    let k = alphabet.size();
    match (&file.scheme, &file.pi) {
        (Some(_), Some(_)) => Err(structural("give either [scheme] or [pi]/[f]/[g]/[h], not both")),
        (None, None) => Err(structural("missing [scheme] or [pi] section")),
        (Some(s), None) => {
            let base_f = s.f.clone().unwrap_or_else(|| vec![1.0 / k as f64; k]);
            let need = |v: Option<f64>, name: &str| {
                v.ok_or_else(|| structural(format!("[scheme] kind = \"{}\" needs `{name}`", s.kind)))
            };
            match s.kind.as_str() {
                "iid" => ParametrizationScheme::iid(need(s.p, "p")?, s.alpha, alphabet, base_f),
                "markov" => ParametrizationScheme::constrained_markov(
                    MarkovFree {
                        pi_hh: need(s.pi_HH, "pi_HH")?,
                        pi_hv: need(s.pi_HV, "pi_HV")?,
                        pi_dv: need(s.pi_DV, "pi_DV")?,
                        pi_vv: need(s.pi_VV, "pi_VV")?,
                        pi_dh: need(s.pi_DH, "pi_DH")?,
                    },
                    s.alpha,
                    alphabet,
                    base_f,
                ),
                other => Err(structural(format!("unknown scheme kind `{other}`"))),
            }
        }
        (None, Some(pi)) => {
            let pi = TransitionMatrix::new([pi.H, pi.V, pi.D])?;
            let f = file.f.as_ref().ok_or_else(|| structural("missing [f]"))?.probs.clone();
            let g = file.g.as_ref().ok_or_else(|| structural("missing [g]"))?.probs.clone();
            let rows = &file.h.as_ref().ok_or_else(|| structural("missing [h]"))?.rows;
            if rows.len() != k || rows.iter().any(|r| r.len() != k) {
                return Err(structural(format!("[h] must be {k} rows of {k} entries")));
            }
            let h = rows.iter().flatten().copied().collect();
            let e = EmissionTables::new(f, g, h)?;
            Ok(ParametrizationScheme::raw(ModelParams::new(alphabet, pi, e)?))
        }
    }
}

/// Canonical text form; `parse_model(&write_model(s))` gives back `s`.
pub fn write_model(scheme: &ParametrizationScheme) -> String {
    let alphabet: String = scheme.alphabet.clone().into();
    let mut file = ModelFile {
        alphabet: Some(alphabet),
        pi: None,
        f: None,
        g: None,
        h: None,
        scheme: None,
    };
    let section = |kind: &str, alpha: f64| SchemeSection {
        kind: kind.to_string(),
        p: None,
        alpha,
        pi_HH: None,
        pi_HV: None,
        pi_DV: None,
        pi_VV: None,
        pi_DH: None,
        f: Some(scheme.base_f.clone()),
    };
    match &scheme.variant {
        SchemeVariant::Iid { p, alpha } => {
            let mut s = section("iid", *alpha);
            s.p = Some(*p);
            file.scheme = Some(s);
        }
        SchemeVariant::ConstrainedMarkov { free, alpha } => {
            let mut s = section("markov", *alpha);
            s.pi_HH = Some(free.pi_hh);
            s.pi_HV = Some(free.pi_hv);
            s.pi_DV = Some(free.pi_dv);
            s.pi_VV = Some(free.pi_vv);
            s.pi_DH = Some(free.pi_dh);
            file.scheme = Some(s);
        }
        SchemeVariant::Raw(theta) => {
            let e = theta.pi().entries();
            file.pi = Some(PiSection {
                H: e[0],
                V: e[1],
                D: e[2],
            });
            let em = theta.emissions();
            let k = em.size();
            file.f = Some(ProbSection {
                probs: em.f_table().to_vec(),
            });
            file.g = Some(ProbSection {
                probs: em.g_table().to_vec(),
            });
            file.h = Some(JointSection {
                rows: em.h_table().chunks(k).map(|r| r.to_vec()).collect(),
            });
        }
    }
    toml::to_string(&file).expect("model serializes")
}
