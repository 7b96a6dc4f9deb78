//! Derivative-free minimization by the Nelder–Mead simplex method.
//!
//! Uses dimension-adaptive coefficients for `n > 2` (expansion `1 + 2/n`,
//! contraction `0.75 - 1/(2n)`, shrink `1 - 1/n`) and the classic
//! `(1, 2, 1/2, 1/2)` otherwise. Infinite values mark infeasible points; the
//! simplex contracts away from them.

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NelderMeadConfig {
    /// Offset of the initial vertices along each axis.
    pub initial_step: f64,
    pub max_evaluations: usize,
    /// Stop once the spread of values over the simplex is at most this.
    pub f_tol: f64,
}

impl Default for NelderMeadConfig {
    fn default() -> Self {
        NelderMeadConfig {
            initial_step: 0.5,
            max_evaluations: 2000,
            f_tol: 1e-8,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
    /// Final simplex, best vertex first.
    pub simplex: Vec<Vec<f64>>,
    pub values: Vec<f64>,
}

fn key(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

fn lerp(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(a, b)| a + t * (b - a)).collect()
}

pub fn minimize<F: FnMut(&[f64]) -> f64>(mut f: F, x0: &[f64], cfg: &NelderMeadConfig) -> NelderMeadResult {
    let n = x0.len();
    assert!(n >= 1, "need at least one coordinate");
    let nf = n as f64;
    let (rho, chi, gamma, sigma) = if n > 2 {
        (1.0, 1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf)
    } else {
        (1.0, 2.0, 0.5, 0.5)
    };
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        key(f(x))
    };

    let mut pts = vec![x0.to_vec()];
    let mut vals = vec![eval(x0, &mut evals)];
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += cfg.initial_step;
        let mut v = eval(&x, &mut evals);
        if v.is_infinite() {
            x[i] = x0[i] - cfg.initial_step;
            v = eval(&x, &mut evals);
        }
        pts.push(x);
        vals.push(v);
    }

    let mut converged = false;
    loop {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| vals[a].partial_cmp(&vals[b]).unwrap());
        pts = order.iter().map(|&i| pts[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();
        let (best, worst) = (vals[0], vals[n]);
        if best.is_finite() && worst - best <= cfg.f_tol {
            converged = true;
            break;
        }
        if evals >= cfg.max_evaluations || best.is_infinite() {
            break;
        }

        let mut c = vec![0.0; n];
        for p in &pts[..n] {
            for (ci, pi) in c.iter_mut().zip(p) {
                *ci += pi / nf;
            }
        }
        let xr = lerp(&c, &pts[n], -rho);
        let fr = eval(&xr, &mut evals);
        if fr < best {
            let xe = lerp(&c, &xr, chi);
            let fe = eval(&xe, &mut evals);
            if fe < fr {
                pts[n] = xe;
                vals[n] = fe;
            } else {
                pts[n] = xr;
                vals[n] = fr;
            }
            continue;
        }
        if fr < vals[n - 1] {
            pts[n] = xr;
            vals[n] = fr;
            continue;
        }
        let (xc, fc, accept) = if fr < worst {
            let xc = lerp(&c, &xr, gamma);
            let fc = eval(&xc, &mut evals);
            let ok = fc <= fr;
            (xc, fc, ok)
        } else {
            let xc = lerp(&c, &pts[n], gamma);
            let fc = eval(&xc, &mut evals);
            let ok = fc < worst;
            (xc, fc, ok)
        };
        if accept {
            pts[n] = xc;
            vals[n] = fc;
            continue;
        }
        for i in 1..=n {
            pts[i] = lerp(&pts[0], &pts[i], sigma);
            vals[i] = eval(&pts[i], &mut evals);
        }
    }
    NelderMeadResult {
        x: pts[0].clone(),
        value: vals[0],
        evaluations: evals,
        converged,
        simplex: pts,
        values: vals,
    }
}
