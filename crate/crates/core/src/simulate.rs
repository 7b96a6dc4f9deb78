//! Reproducible sampling of hidden paths and emitted sequence pairs.
//!
//! Every random stream is a ChaCha8 generator keyed by `(root_seed, purpose)`
//! and positioned on stream `replicate_index`, so replicates are independent of
//! each other and of the order in which they are run. Paths and emissions use
//! separate purposes; each step consumes exactly one draw, so a sample of
//! length `t` is a prefix of the sample of length `2t` from the same seed.

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::alphabet::Symbol;
use crate::model::{endpoint, HiddenState, ModelParams};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedSpec {
    pub root_seed: u64,
    pub replicate_index: u64,
}

impl SeedSpec {
    pub fn new(root_seed: u64, replicate_index: u64) -> Self {
        SeedSpec {
            root_seed,
            replicate_index,
        }
    }
}

/// What a stream is used for; part of the key.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u64)]
pub enum StreamPurpose {
    Path = 0,
    Emission = 1,
    Other = 2,
}

pub fn stream(seed: SeedSpec, purpose: StreamPurpose) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.root_seed.to_le_bytes());
    key[8..16].copy_from_slice(&(purpose as u64).to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(seed.replicate_index);
    rng
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignmentSample {
    pub path: Vec<HiddenState>,
    pub x: Vec<Symbol>,
    pub y: Vec<Symbol>,
    pub endpoint: (usize, usize),
}

impl AlignmentSample {
    pub fn t(&self) -> usize {
        self.path.len()
    }
}

fn categorical<T: Real>(weights: impl IntoIterator<Item = T>) -> WeightedIndex<f64> {
    WeightedIndex::new(weights.into_iter().map(|w| w.f64())).expect("validated probability table")
}

/// Stationary start, then transitions along the rows of `pi`.
pub fn simulate_path<T: Real>(theta: &ModelParams<T>, t: usize, seed: SeedSpec) -> Vec<HiddenState> {
    if t == 0 {
        return Vec::new();
    }
    let mut rng = stream(seed, StreamPurpose::Path);
    let start = categorical(theta.mu());
    let rows: Vec<WeightedIndex<f64>> = theta.pi().entries().iter().map(|r| categorical(*r)).collect();
    let mut path = Vec::with_capacity(t);
    let mut s = start.sample(&mut rng);
    path.push(HiddenState::from_index(s));
    for _ in 1..t {
        s = rows[s].sample(&mut rng);
        path.push(HiddenState::from_index(s));
    }
    path
}

/// Emits one symbol of `x` per `H`, one of `y` per `V` and an aligned pair per
/// `D`, independently across steps.
pub fn emit_sequences<T: Real>(
    theta: &ModelParams<T>,
    path: &[HiddenState],
    seed: SeedSpec,
) -> (Vec<Symbol>, Vec<Symbol>) {
    let (n, m) = endpoint(path);
    let (mut x, mut y) = (Vec::with_capacity(n), Vec::with_capacity(m));
    if path.is_empty() {
        return (x, y);
    }
    let e = theta.emissions();
    let k = e.size();
    let (f, g, h) = (
        categorical(e.f_table().iter().copied()),
        categorical(e.g_table().iter().copied()),
        categorical(e.h_table().iter().copied()),
    );
    let mut rng = stream(seed, StreamPurpose::Emission);
    for s in path {
        match s {
            HiddenState::H => x.push(f.sample(&mut rng) as Symbol),
            HiddenState::V => y.push(g.sample(&mut rng) as Symbol),
            HiddenState::D => {
                let c = h.sample(&mut rng);
                x.push((c / k) as Symbol);
                y.push((c % k) as Symbol);
            }
        }
    }
    (x, y)
}

pub fn simulate_pair<T: Real>(theta: &ModelParams<T>, t: usize, seed: SeedSpec) -> AlignmentSample {
    let path = simulate_path(theta, t, seed);
    let (x, y) = emit_sequences(theta, &path, seed);
    AlignmentSample {
        endpoint: (x.len(), y.len()),
        path,
        x,
        y,
    }
}

/// A `u64` drawn from a dedicated stream; used to derive further seeds.
pub fn derived_u64(seed: SeedSpec) -> u64 {
    stream(seed, StreamPurpose::Other).gen()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::Alphabet;
    use crate::model::{substitution_emissions, EmissionTables, TransitionMatrix};

    fn iid() -> ModelParams {
        let pi = TransitionMatrix::iid([0.25, 0.25, 0.5]).unwrap();
        let e = substitution_emissions(&[0.25; 4], 0.05).unwrap();
        ModelParams::new(Alphabet::dna(), pi, e).unwrap()
    }

    #[test]
    fn empty_sample() {
        let s = simulate_pair(&iid(), 0, SeedSpec::new(1, 0));
        assert!(s.path.is_empty() && s.x.is_empty() && s.y.is_empty());
        assert_eq!(s.endpoint, (0, 0));
    }

    #[test]
    fn deterministic_and_stream_separated() {
        let theta = iid();
        let a = simulate_pair(&theta, 500, SeedSpec::new(7, 3));
        let b = simulate_pair(&theta, 500, SeedSpec::new(7, 3));
        assert_eq!(a, b);
        let c = simulate_pair(&theta, 500, SeedSpec::new(7, 4));
        assert_ne!(a.path, c.path);
        let d = simulate_pair(&theta, 500, SeedSpec::new(8, 3));
        assert_ne!(a.path, d.path);
    }

    #[test]
    fn longer_samples_extend_shorter_ones() {
        let theta = iid();
        let short = simulate_pair(&theta, 300, SeedSpec::new(11, 2));
        let long = simulate_pair(&theta, 600, SeedSpec::new(11, 2));
        assert_eq!(&long.path[..300], &short.path[..]);
        assert_eq!(&long.x[..short.x.len()], &short.x[..]);
        assert_eq!(&long.y[..short.y.len()], &short.y[..]);
    }

    #[test]
    fn endpoint_bookkeeping() {
        let s = simulate_pair(&iid(), 1000, SeedSpec::new(5, 0));
        let (n, m) = s.endpoint;
        let count = |st| s.path.iter().filter(|&&p| p == st).count();
        assert_eq!(n, count(HiddenState::H) + count(HiddenState::D));
        assert_eq!(m, count(HiddenState::V) + count(HiddenState::D));
        assert!(n.max(m) <= 1000 && 1000 <= n + m);
    }

    #[test]
    fn single_letter_alphabet() {
        let pi = TransitionMatrix::iid([0.25, 0.25, 0.5]).unwrap();
        let e = EmissionTables::new(vec![1.0], vec![1.0], vec![1.0]).unwrap();
        let theta = ModelParams::new(Alphabet::new(['a']).unwrap(), pi, e).unwrap();
        let s = simulate_pair(&theta, 200, SeedSpec::new(1, 1));
        assert!(s.x.iter().chain(&s.y).all(|&c| c == 0));
    }
}
