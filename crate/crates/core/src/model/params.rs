use crate::alphabet::Alphabet;
use crate::error::{Error, Result};
use crate::model::{EmissionTables, HiddenState, TransitionMatrix};
use crate::scalar::Real;

/// Full pair-HMM parameter: hidden transitions, emission laws and the derived
/// stationary law `mu = (p, q, r)` of the hidden chain.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams<T: Real = f64> {
    alphabet: Alphabet,
    pi: TransitionMatrix<T>,
    emissions: EmissionTables<T>,
    mu: [T; 3],
}

impl<T: Real> ModelParams<T> {
    pub fn new(
        alphabet: Alphabet,
        pi: TransitionMatrix<T>,
        emissions: EmissionTables<T>,
    ) -> Result<Self> {
        if emissions.size() != alphabet.size() {
            return Err(Error::InvalidParameter(format!(
                "emission tables cover {} symbols, alphabet has {}",
                emissions.size(),
                alphabet.size()
            )));
        }
        let mu = pi.stationary()?;
        for to in HiddenState::ALL {
            let flow: f64 = HiddenState::ALL
                .iter()
                .map(|&from| mu[from.index()].f64() * pi.get(from, to).f64())
                .sum();
            if (flow - mu[to.index()].f64()).abs() > T::STATIONARY_TOL {
                return Err(Error::NonIrreducible);
            }
        }
        Ok(ModelParams {
            alphabet,
            pi,
            emissions,
            mu,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn pi(&self) -> &TransitionMatrix<T> {
        &self.pi
    }

    pub fn emissions(&self) -> &EmissionTables<T> {
        &self.emissions
    }

    /// Stationary law `(p, q, r)` in `(H, V, D)` order.
    pub fn mu(&self) -> [T; 3] {
        self.mu
    }

    pub fn with_pi(&self, pi: TransitionMatrix<T>) -> Result<Self> {
        Self::new(self.alphabet.clone(), pi, self.emissions.clone())
    }

    /// The model with the two sequences exchanged: `H <-> V`, `f <-> g`, `h`
    /// transposed. Pair probabilities satisfy `P'(y, x) = P(x, y)`.
    pub fn mirrored(&self) -> Self {
        let mu = self.mu;
        ModelParams {
            alphabet: self.alphabet.clone(),
            pi: self.pi.mirrored(),
            emissions: self.emissions.mirrored(),
            mu: [mu[1], mu[0], mu[2]],
        }
    }

    pub fn cast<U: Real>(&self) -> Result<ModelParams<U>> {
        ModelParams::new(self.alphabet.clone(), self.pi.cast(), self.emissions.cast())
    }

    /// Mean lattice increment of one step: `(p + r, q + r)`.
    pub fn mean_step(&self) -> (T, T) {
        let [p, q, r] = self.mu;
        (p + r, q + r)
    }

    /// Supremum distance over every entry of `pi`, `f`, `g` and `h`.
    pub fn sup_distance(&self, other: &ModelParams<T>) -> T {
        let mut d = T::zero();
        for (a, b) in self.pi.entries().iter().flatten().zip(other.pi.entries().iter().flatten()) {
            d = d.max((*a - *b).abs());
        }
        let (e1, e2) = (&self.emissions, &other.emissions);
        for (a, b) in e1
            .f_table()
            .iter()
            .chain(e1.g_table())
            .chain(e1.h_table())
            .zip(e2.f_table().iter().chain(e2.g_table()).chain(e2.h_table()))
        {
            d = d.max((*a - *b).abs());
        }
        d
    }

    /// Smallest entry over `pi`, `f`, `g`, `h`, with its label.
    pub fn min_entry(&self) -> (String, T) {
        let mut best = self.emissions.min_entry();
        for from in HiddenState::ALL {
            for to in HiddenState::ALL {
                let v = self.pi.get(from, to);
                if v < best.1 {
                    best = (format!("pi_{from}{to}"), v);
                }
            }
        }
        best
    }
}

/// Lower bound on every probability of the model; defines the compact set of
/// parameters with all entries at least `delta`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParamFloor {
    delta: f64,
}

impl ParamFloor {
    pub const ESTIMATION_DEFAULT: f64 = 1e-4;
    pub const PROPERTY_TEST_DEFAULT: f64 = 0.05;

    pub fn new(delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0 / 3.0) {
            return Err(Error::InvalidParameter(format!(
                "probability floor {delta} outside (0, 1/3)"
            )));
        }
        Ok(ParamFloor { delta })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn contains<T: Real>(&self, theta: &ModelParams<T>) -> bool {
        theta.min_entry().1.f64() >= self.delta
    }

    pub fn check<T: Real>(&self, theta: &ModelParams<T>) -> Result<()> {
        let (what, value) = theta.min_entry();
        if value.f64() < self.delta {
            return Err(Error::FloorViolation {
                what,
                value: value.f64(),
                delta: self.delta,
            });
        }
        Ok(())
    }
}

impl Default for ParamFloor {
    fn default() -> Self {
        ParamFloor {
            delta: Self::ESTIMATION_DEFAULT,
        }
    }
}

/// Which of the structural assumptions of the model hold for a parameter.
#[derive(Clone, Debug, PartialEq)]
pub struct AssumptionReport {
    /// Some aligned pair has `h(x, y) != f(x) g(y)`.
    pub a1_identifiable: bool,
    /// Insertion and deletion frequencies agree (`p = q`).
    pub a2_p_equals_q: bool,
    /// `h_X = f` and `h_Y = g`.
    pub a3_marginal_match: bool,
    pub max_marginal_gap: f64,
}

pub const IDENTIFIABILITY_TOL: f64 = 1e-9;
pub const MARGINAL_TOL: f64 = 1e-10;

pub fn check_assumptions<T: Real>(theta: &ModelParams<T>) -> AssumptionReport {
    let e = theta.emissions();
    let k = e.size();
    let mut independence_gap = 0.0f64;
    for a in 0..k {
        for b in 0..k {
            let (a, b) = (a as u8, b as u8);
            independence_gap =
                independence_gap.max((e.h(a, b).f64() - e.f(a).f64() * e.g(b).f64()).abs());
        }
    }
    let mut gap = 0.0f64;
    for (hx, f) in e.h_x().iter().zip(e.f_table()) {
        gap = gap.max((hx.f64() - f.f64()).abs());
    }
    for (hy, g) in e.h_y().iter().zip(e.g_table()) {
        gap = gap.max((hy.f64() - g.f64()).abs());
    }
    let mu = theta.mu();
    AssumptionReport {
        a1_identifiable: independence_gap > IDENTIFIABILITY_TOL,
        a2_p_equals_q: (mu[0].f64() - mu[1].f64()).abs() <= MARGINAL_TOL,
        a3_marginal_match: gap <= MARGINAL_TOL,
        max_marginal_gap: gap,
    }
}

/// True when the mean steps under `theta` and `theta0` are not collinear
/// (not aligned with the origin). Diagnostic only: for any pair of parameters
/// with `p = q` the mean steps lie on the diagonal and this is false.
pub fn is_in_theta_exp<T: Real>(theta: &ModelParams<T>, theta0: &ModelParams<T>) -> bool {
    let (a, b) = theta.mean_step();
    let (a0, b0) = theta0.mean_step();
    let cross = a.f64() * b0.f64() - b.f64() * a0.f64();
    cross.abs() > MARGINAL_TOL
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::substitution_emissions;

    fn iid(p: f64, q: f64, e: EmissionTables) -> ModelParams {
        let pi = TransitionMatrix::iid([p, q, 1.0 - p - q]).unwrap();
        ModelParams::new(Alphabet::dna(), pi, e).unwrap()
    }

    #[test]
    fn product_emissions_are_not_identifiable() {
        let f = vec![0.1, 0.2, 0.3, 0.4];
        let g = vec![0.25; 4];
        let h: Vec<f64> = f.iter().flat_map(|a| g.iter().map(move |b| a * b)).collect();
        let e = EmissionTables::<f64>::new(f, g, h).unwrap();
        let r = check_assumptions(&iid(0.25, 0.25, e));
        assert!(!r.a1_identifiable);
        assert!(r.a3_marginal_match);
    }

    #[test]
    fn substitution_model_satisfies_assumptions() {
        let e = substitution_emissions(&[0.25; 4], 0.05).unwrap();
        let r = check_assumptions(&iid(0.25, 0.25, e));
        // max |h - f f| = e^-0.05 (0.25 - 0.0625) on the diagonal.
        let gap = (-0.05f64).exp() * (0.25 - 0.0625);
        assert!(gap > IDENTIFIABILITY_TOL);
        assert!(r.a1_identifiable && r.a2_p_equals_q && r.a3_marginal_match);
        assert!(r.max_marginal_gap <= 1e-15);
    }

    #[test]
    fn unequal_gap_frequencies() {
        let e = substitution_emissions(&[0.25; 4], 0.05).unwrap();
        let r = check_assumptions(&iid(0.3, 0.2, e));
        assert!(!r.a2_p_equals_q);
    }

    #[test]
    fn floor_membership() {
        let e = substitution_emissions(&[0.25; 4], 0.05).unwrap();
        let theta = iid(0.25, 0.25, e);
        // Off-diagonal h is about 0.003.
        assert!(ParamFloor::new(1e-4).unwrap().contains(&theta));
        assert!(!ParamFloor::new(0.05).unwrap().contains(&theta));
        assert!(matches!(
            ParamFloor::new(0.05).unwrap().check(&theta),
            Err(Error::FloorViolation { .. })
        ));
        assert!(ParamFloor::new(0.0).is_err());
        assert!(ParamFloor::new(0.34).is_err());
    }

    #[test]
    fn theta_exp_predicate() {
        let e = substitution_emissions(&[0.25; 4], 0.05).unwrap();
        let a = iid(0.25, 0.25, e.clone());
        let b = iid(0.1, 0.1, e.clone());
        let c = iid(0.3, 0.1, e);
        assert!(!is_in_theta_exp(&b, &a));
        assert!(is_in_theta_exp(&c, &a));
    }

    #[test]
    fn mirrored_swaps_roles() {
        let e = EmissionTables::<f64>::new(vec![0.5, 0.5], vec![0.3, 0.7], vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let pi = TransitionMatrix::new([[0.5, 0.2, 0.3], [0.1, 0.6, 0.3], [0.2, 0.1, 0.7]]).unwrap();
        let theta = ModelParams::new(Alphabet::new("ab".chars()).unwrap(), pi, e).unwrap();
        let m = theta.mirrored();
        let recomputed = ModelParams::new(m.alphabet().clone(), m.pi().clone(), m.emissions().clone()).unwrap();
        for i in 0..3 {
            assert!((m.mu()[i] - recomputed.mu()[i]).abs() < 1e-14);
        }
    }
}
