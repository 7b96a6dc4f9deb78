mod common;

use pairhmm::divergence::{divergence, estimate_l, estimate_w, mean_se, RateTarget};
use pairhmm::dp;
use pairhmm::experiment::iid_truth;
use pairhmm::model::ParamName;
use pairhmm::simulate::{simulate_pair, SeedSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn divergences_are_nonnegative_around_the_truth() {
    let truth = iid_truth();
    let theta0 = truth.theta::<f64>().unwrap();
    for (p, a) in [(0.2, 0.05), (0.3, 0.05), (0.25, 0.02), (0.25, 0.1), (0.2, 0.1)] {
        let th = truth.with(&[(ParamName::P, p), (ParamName::Alpha, a)]).unwrap().theta().unwrap();
        let d = divergence(&th, &theta0, 400, 8, 3, RateTarget::D).unwrap();
        assert!(d.mean >= -3.0 * d.se, "D at ({p}, {a}): {} se {}", d.mean, d.se);
        let d = divergence(&th, &theta0, 120, 8, 3, RateTarget::DStar).unwrap();
        assert!(d.mean >= -3.0 * d.se, "D* at ({p}, {a}): {} se {}", d.mean, d.se);
    }
}

#[test]
fn normalized_criteria_are_equicontinuous() {
    let (delta, t) = (0.05, 150);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for k in 0..20u64 {
        let a = rng.gen_range(0.001..0.01);
        let th1 = common::random_theta(100 + k, delta);
        let th2 = common::neighbour(&mut rng, &th1, a, delta);
        assert!(th1.sup_distance(&th2) <= a + 1e-15);
        let s = simulate_pair(&th1, t, SeedSpec::new(7, k));
        let bound = 4.0 * a / delta;
        let w = |th| dp::log_q(th, &s.x, &s.y).unwrap().value / t as f64;
        let l = |th| dp::log_l_fixed_t(th, &s.x, &s.y, t).unwrap().value / t as f64;
        assert!((w(&th1) - w(&th2)).abs() <= bound);
        assert!((l(&th1) - l(&th2)).abs() <= bound);
    }
}

fn running_rates(paths: u64) -> [f64; 4] {
    let theta0 = iid_truth().theta::<f64>().unwrap();
    let ts = [500, 1000, 2000, 4000];
    let mut rates = [0.0; 4];
    for r in 0..paths {
        let long = simulate_pair(&theta0, 4000, SeedSpec::new(1, r));
        for (k, &t) in ts.iter().enumerate() {
            // Shorter samples are prefixes of the long one.
            let s = simulate_pair(&theta0, t, SeedSpec::new(1, r));
            assert_eq!(s.path[..], long.path[..t]);
            rates[k] += dp::log_q(&theta0, &s.x, &s.y).unwrap().value / t as f64 / paths as f64;
        }
    }
    rates
}

fn successive_differences(rates: &[f64; 4]) -> Vec<f64> {
    rates.windows(2).map(|w| (w[1] - w[0]).abs()).collect()
}

#[test]
fn mean_running_rate_settles() {
    let d = successive_differences(&running_rates(20));
    assert!(d[2] <= 0.01, "{d:?}");
}

/// The per-path noise, about 0.6 / sqrt(t), is as large as the drift, so the
/// differences need not shrink monotonically on a single path.
#[test]
#[ignore = "noise-dominated at t <= 4000; kept to document the observed values"]
fn running_rate_differences_shrink_along_one_path() {
    let d = successive_differences(&running_rates(1));
    assert!(d.windows(2).all(|w| w[1] < w[0]) && d[2] <= 0.01, "{d:?}");
}

#[test]
fn expected_rate_is_nondecreasing_in_t() {
    let theta0 = iid_truth().theta::<f64>().unwrap();
    let runs: Vec<_> = [250, 500, 1000].iter().map(|&t| estimate_w(&theta0, &theta0, t, 200, 9).unwrap()).collect();
    for w in runs.windows(2) {
        // Nested samples make the replicates paired.
        let diff: Vec<f64> = w[1].values.iter().zip(&w[0].values).map(|(b, a)| b - a).collect();
        let (mean, se) = mean_se(&diff);
        assert!(mean >= -2.0 * se, "t {} -> {}: {mean} se {se}", w[0].t, w[1].t);
    }
}

#[test]
fn fixed_length_rate_stays_below_w() {
    let theta0 = iid_truth().theta::<f64>().unwrap();
    let w = estimate_w(&theta0, &theta0, 200, 10, 4).unwrap();
    let l = estimate_l(&theta0, &theta0, 200, 10, 4).unwrap();
    for (a, b) in l.values.iter().zip(&w.values) {
        assert!(a <= b);
    }
}
