//! Helpers shared by the integration test targets.
#![allow(dead_code)]

use pairhmm::alphabet::Alphabet;
use pairhmm::model::{random_params, EmissionTables, ModelParams, ParamFloor, TransitionMatrix};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn random_theta(seed: u64, delta: f64) -> ModelParams {
    random_params(&mut ChaCha8Rng::seed_from_u64(seed), &Alphabet::dna(), ParamFloor::new(delta).unwrap())
}

/// Adds a zero-sum shift with largest entry `a` to a probability vector.
fn shift<R: Rng>(rng: &mut R, v: &[f64], a: f64) -> Vec<f64> {
    let d: Vec<f64> = v.iter().map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mean = d.iter().sum::<f64>() / d.len() as f64;
    let d: Vec<f64> = d.iter().map(|x| x - mean).collect();
    let big = d.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    v.iter().zip(&d).map(|(p, x)| p + a * x / big).collect()
}

/// A neighbour of `theta` at sup distance exactly `a` inside the same floor.
pub fn neighbour<R: Rng>(rng: &mut R, theta: &ModelParams, a: f64, delta: f64) -> ModelParams {
    let floor = ParamFloor::new(delta).unwrap();
    loop {
        let mut rows = [[0.0; 3]; 3];
        for (r, row) in theta.pi().entries().iter().enumerate() {
            rows[r].copy_from_slice(&shift(rng, row, a));
        }
        let e = theta.emissions();
        let built = TransitionMatrix::new(rows).and_then(|pi| {
            let em = EmissionTables::new(shift(rng, e.f_table(), a), shift(rng, e.g_table(), a), shift(rng, e.h_table(), a))?;
            ModelParams::new(theta.alphabet().clone(), pi, em)
        });
        if let Ok(th) = built {
            if floor.contains(&th) {
                return th;
            }
        }
    }
}
