use pairhmm::dp::{self, Criterion};
use pairhmm::experiment::{iid_truth, markov_truth};
use pairhmm::inference::{linspace, minimize, mle, posterior_grid, Coordinate, NelderMeadConfig, Observation, OptimizerConfig};
use pairhmm::model::{theta_from_beta, ModelParams, ParamName};
use pairhmm::simulate::{simulate_pair, SeedSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BOUNDS: (f64, f64) = (1e-3, 2.0);

fn iid_coords() -> [Coordinate; 2] {
    [
        Coordinate::for_param(ParamName::P, 1e-4, BOUNDS),
        Coordinate::for_param(ParamName::Alpha, 1e-4, BOUNDS),
    ]
}

/// Negative log Q on unconstrained coordinates of the i.i.d. scheme.
fn neg_log_q(obs: &Observation) -> impl Fn(&[f64]) -> f64 + '_ {
    let coords = iid_coords();
    move |u: &[f64]| {
        let assign: Vec<_> = coords.iter().zip(u).map(|(c, &u)| (c.name, c.to_value(u))).collect();
        match iid_truth().with(&assign).and_then(|s| s.theta::<f64>()) {
            Ok(th) => -dp::log_q(&th, &obs.x, &obs.y).unwrap().value,
            Err(_) => f64::INFINITY,
        }
    }
}

fn sample_obs(t: usize, r: u64) -> Observation {
    let th = iid_truth().theta::<f64>().unwrap();
    Observation::from_sample(&simulate_pair(&th, t, SeedSpec::new(17, r)))
}

#[test]
fn argmax_ignores_shift_and_scale() {
    let obs = sample_obs(300, 0);
    let f = neg_log_q(&obs);
    let cfg = NelderMeadConfig { f_tol: 1e-9, ..NelderMeadConfig::default() };
    let x0 = [0.3, -1.0];
    let base = minimize(&f, &x0, &cfg);
    assert!(base.converged);
    // A power-of-two scale keeps every comparison exact: identical traces.
    let scaled = minimize(
        |u: &[f64]| f(u) / 256.0,
        &x0,
        &NelderMeadConfig { f_tol: cfg.f_tol / 256.0, ..cfg },
    );
    assert_eq!(scaled.x, base.x);
    assert_eq!(scaled.evaluations, base.evaluations);
    let shifted = minimize(|u: &[f64]| f(u) + 1000.0, &x0, &cfg);
    for (a, b) in shifted.x.iter().zip(&base.x) {
        assert!((a - b).abs() < 1e-3, "{:?} vs {:?}", shifted.x, base.x);
    }
}

#[test]
fn reported_value_is_the_best_seen() {
    for r in 0..3 {
        let obs = sample_obs(250, r);
        let cfg = OptimizerConfig { multistart: 3, ..OptimizerConfig::default() };
        let rep = mle(&obs, &iid_truth(), &[ParamName::P, ParamName::Alpha], &[], &cfg).unwrap();
        for s in &rep.starts {
            assert!(rep.criterion_value >= s.value - 1e-12);
        }
        let th = theta_from_beta::<f64>(&rep.scheme_hat, None).unwrap();
        let direct = dp::log_q(&th, &obs.x, &obs.y).unwrap().value / obs.normalizer();
        assert!((direct - rep.criterion_value).abs() <= 1e-12);
        assert_eq!(rep.scheme_hat.get(ParamName::P).unwrap(), rep.beta_hat[0]);
    }
}

/// Reads the rate back from the substitution table's first diagonal entry.
fn alpha_of(th: &ModelParams) -> f64 {
    let f = th.emissions().f_table()[0];
    let keep = (th.emissions().h(0, 0) / f - f) / (1.0 - f);
    -keep.ln()
}

#[test]
fn reparametrization_round_trips() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let [cp, ca] = iid_coords();
    for _ in 0..100 {
        let u = [rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0)];
        let (p, a) = (cp.to_value(u[0]), ca.to_value(u[1]));
        let th: ModelParams = iid_truth()
            .with(&[(ParamName::P, p), (ParamName::Alpha, a)])
            .unwrap()
            .theta()
            .unwrap();
        let back = [cp.to_unconstrained(th.pi().entries()[0][0]), ca.to_unconstrained(alpha_of(&th))];
        assert!((back[0] - u[0]).abs() <= 1e-10 && (back[1] - u[1]).abs() <= 1e-10, "{u:?} -> {back:?}");
    }

    let names = [ParamName::PiHH, ParamName::PiHV, ParamName::PiDV, ParamName::PiVV, ParamName::PiDH];
    let truth = markov_truth();
    let mut done = 0;
    while done < 100 {
        let u: Vec<f64> = names.iter().map(|_| rng.gen_range(-1.0..1.0)).collect();
        let assign: Vec<_> = names
            .iter()
            .zip(&u)
            .map(|(&n, &u)| (n, Coordinate::for_param(n, 1e-4, BOUNDS).to_value(u)))
            .collect();
        // Some draws have no completion with equal gap frequencies.
        let Ok(th) = truth.with(&assign).and_then(|s| s.theta::<f64>()) else { continue };
        let e = th.pi().entries();
        let read = [e[0][0], e[0][1], e[2][1], e[1][1], e[2][0]];
        for ((&n, &u), v) in names.iter().zip(&u).zip(read) {
            let back = Coordinate::for_param(n, 1e-4, BOUNDS).to_unconstrained(v);
            assert!((back - u).abs() <= 1e-10, "{n}: {u} -> {back}");
        }
        done += 1;
    }
}

#[test]
fn posterior_concentrates_on_nested_data() {
    let truth = iid_truth();
    let th = truth.theta::<f64>().unwrap();
    let points: Vec<Vec<f64>> = linspace(0.05, 0.45, 21).into_iter().map(|v| vec![v]).collect();
    let step = 0.02;
    let mass = |t: usize, r: u64| {
        let obs = Observation::from_sample(&simulate_pair(&th, t, SeedSpec::new(23, r)));
        posterior_grid(&obs, &truth, &[ParamName::P], &points, &[], Criterion::Q)
            .unwrap()
            .mass_within(&[0.25], step + 1e-12)
    };
    let up = (0..50).filter(|&r| mass(1000, r) >= mass(500, r)).count();
    assert!(up >= 40, "{up} of 50");
}
