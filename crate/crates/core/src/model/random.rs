use rand::Rng;

use crate::alphabet::Alphabet;
use crate::model::{EmissionTables, ModelParams, ParamFloor, TransitionMatrix};

/// `len` probabilities, each at least `delta`, with the excess spread by
/// uniform weights.
fn floored_simplex<R: Rng + ?Sized>(rng: &mut R, len: usize, delta: f64) -> Vec<f64> {
    let w: Vec<f64> = (0..len).map(|_| rng.gen::<f64>() + 1e-3).collect();
    let s: f64 = w.iter().sum();
    let free = 1.0 - len as f64 * delta;
    w.iter().map(|v| delta + free * v / s).collect()
}

/// A random full parameter with every entry of `pi`, `f`, `g`, `h` at least
/// `floor.delta()`. Needs `k^2 * delta < 1`.
pub fn random_params<R: Rng + ?Sized>(rng: &mut R, alphabet: &Alphabet, floor: ParamFloor) -> ModelParams {
    let delta = floor.delta();
    let k = alphabet.size();
    assert!(
        (k * k) as f64 * delta < 1.0,
        "floor {delta} too high for {k} symbols"
    );
    let mut rows = [[0.0; 3]; 3];
    for r in rows.iter_mut() {
        let v = floored_simplex(rng, 3, delta);
        r.copy_from_slice(&v);
    }
    let pi = TransitionMatrix::new(rows).expect("valid rows");
    let e = EmissionTables::new(
        floored_simplex(rng, k, delta),
        floored_simplex(rng, k, delta),
        floored_simplex(rng, k * k, delta),
    )
    .expect("valid tables");
    ModelParams::new(alphabet.clone(), pi, e).expect("positive chain is irreducible")
}
