//! Text formats: sequences (FASTA-style or one sequence per line), paths,
//! fixed-precision floats and the tabular outputs.

use std::io::Write;

use crate::alphabet::{Alphabet, Symbol};
use crate::error::{Error, Result};
use crate::model::{path_from_str, path_to_string, HiddenState};

/// Significant digits of every float written by this crate.
pub const FLOAT_DIGITS: usize = 12;

/// Formats `v` with exactly 12 significant digits: positional notation for
/// exponents in `[-5, 12)`, scientific otherwise.
pub fn fmt_float(v: f64) -> String {
    if v.is_nan() {
        return "NaN".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return format!("{:.*}", FLOAT_DIGITS - 1, 0.0);
    }
    let sci = format!("{:.*e}", FLOAT_DIGITS - 1, v);
    let exp: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    if (-5..FLOAT_DIGITS as i32).contains(&exp) {
        format!("{:.*}", (FLOAT_DIGITS as i32 - 1 - exp) as usize, v)
    } else {
        sci
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Record {
    pub name: Option<String>,
    pub seq: Vec<Symbol>,
}

fn encode_line(alphabet: &Alphabet, text: &str, line: usize) -> Result<Vec<Symbol>> {
    alphabet.encode(text).map_err(|e| Error::Parse {
        line,
        message: e.to_string(),
    })
}

/// Reads FASTA records if the first non-blank line starts with `>`; otherwise
/// every line (blank ones included) is one unnamed sequence.
pub fn read_records(text: &str, alphabet: &Alphabet) -> Result<Vec<Record>> {
    let fasta = text
        .lines()
        .find(|l| !l.trim().is_empty())
        .is_some_and(|l| l.trim_start().starts_with('>'));
    let mut out = Vec::new();
    if !fasta {
        for (i, l) in text.lines().enumerate() {
            out.push(Record {
                name: None,
                seq: encode_line(alphabet, l, i + 1)?,
            });
        }
        return Ok(out);
    }
    for (i, l) in text.lines().enumerate() {
        let l = l.trim();
        if let Some(name) = l.strip_prefix('>') {
            out.push(Record {
                name: Some(name.trim().to_string()),
                seq: Vec::new(),
            });
        } else if !l.is_empty() {
            let rec = out.last_mut().ok_or_else(|| Error::Parse {
                line: i + 1,
                message: "sequence data before the first header".into(),
            })?;
            rec.seq.extend(encode_line(alphabet, l, i + 1)?);
        }
    }
    Ok(out)
}

/// A single sequence: the first FASTA record, or all lines of a raw file joined.
pub fn read_sequence(text: &str, alphabet: &Alphabet) -> Result<Vec<Symbol>> {
    let recs = read_records(text, alphabet)?;
    if recs.iter().any(|r| r.name.is_some()) {
        return recs.into_iter().next().map(|r| r.seq).ok_or(Error::EmptyInput);
    }
    Ok(recs.into_iter().flat_map(|r| r.seq).collect())
}

/// Two sequences from one file: two FASTA records or two lines.
pub fn read_pair(text: &str, alphabet: &Alphabet) -> Result<(Vec<Symbol>, Vec<Symbol>)> {
    let mut recs = read_records(text, alphabet)?;
    if recs.len() != 2 {
        return Err(Error::Parse {
            line: 0,
            message: format!("expected two sequences, found {}", recs.len()),
        });
    }
    let y = recs.pop().unwrap().seq;
    let x = recs.pop().unwrap().seq;
    Ok((x, y))
}

pub fn write_fasta<W: Write>(out: &mut W, alphabet: &Alphabet, records: &[Record]) -> std::io::Result<()> {
    for (i, r) in records.iter().enumerate() {
        let name = r.name.clone().unwrap_or_else(|| format!("seq{}", i + 1));
        writeln!(out, ">{name}")?;
        let text = alphabet.decode(&r.seq);
        let chars: Vec<char> = text.chars().collect();
        for chunk in chars.chunks(60) {
            writeln!(out, "{}", chunk.iter().collect::<String>())?;
        }
    }
    Ok(())
}

pub fn write_two_line<W: Write>(
    out: &mut W,
    alphabet: &Alphabet,
    x: &[Symbol],
    y: &[Symbol],
) -> std::io::Result<()> {
    writeln!(out, "{}", alphabet.decode(x))?;
    writeln!(out, "{}", alphabet.decode(y))
}

pub fn write_path<W: Write>(out: &mut W, path: &[HiddenState]) -> std::io::Result<()> {
    writeln!(out, "{}", path_to_string(path))
}

pub fn read_path(text: &str) -> Result<Vec<HiddenState>> {
    let joined: String = text.split_whitespace().collect();
    path_from_str(&joined).ok_or_else(|| Error::Parse {
        line: 1,
        message: "path may only contain H, V and D".into(),
    })
}

/// One row of an estimate table.
#[derive(Clone, Debug, PartialEq)]
pub struct EstimateRow {
    pub replicate_index: u64,
    pub seed: u64,
    pub estimates: Vec<f64>,
    pub criterion: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Header: `replicate_index, seed, <one column per parameter>, criterion,
/// evaluations, converged`.
pub fn write_estimates_csv<W: Write>(out: W, names: &[String], rows: &[EstimateRow]) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    let mut header = vec!["replicate_index".to_string(), "seed".to_string()];
    header.extend(names.iter().cloned());
    header.extend(["criterion", "evaluations", "converged"].map(String::from));
    w.write_record(&header)?;
    for r in rows {
        let mut rec = vec![r.replicate_index.to_string(), r.seed.to_string()];
        rec.extend(r.estimates.iter().map(|&v| fmt_float(v)));
        rec.push(fmt_float(r.criterion));
        rec.push(r.evaluations.to_string());
        rec.push(r.converged.to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Parses an estimate table back; returns the parameter names and rows.
pub fn read_estimates_csv<R: std::io::Read>(input: R) -> Result<(Vec<String>, Vec<EstimateRow>)> {
    let bad = |line: usize, message: String| Error::Parse { line, message };
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r
        .headers()
        .map_err(|e| bad(1, e.to_string()))?
        .iter()
        .map(String::from)
        .collect();
    let k = header.len();
    if k < 5
        || header[0] != "replicate_index"
        || header[1] != "seed"
        || header[k - 3..] != ["criterion", "evaluations", "converged"]
    {
        return Err(bad(1, format!("unexpected estimate header {header:?}")));
    }
    let names = header[2..k - 3].to_vec();
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| bad(line, e.to_string()))?;
        let num = |j: usize| -> Result<f64> {
            rec[j].parse().map_err(|_| bad(line, format!("bad number `{}`", &rec[j])))
        };
        rows.push(EstimateRow {
            replicate_index: rec[0].parse().map_err(|_| bad(line, "bad index".into()))?,
            seed: rec[1].parse().map_err(|_| bad(line, "bad seed".into()))?,
            estimates: (2..k - 3).map(num).collect::<Result<_>>()?,
            criterion: num(k - 3)?,
            evaluations: rec[k - 2].parse().map_err(|_| bad(line, "bad count".into()))?,
            converged: rec[k - 1].parse().map_err(|_| bad(line, "bad flag".into()))?,
        });
    }
    Ok((names, rows))
}
