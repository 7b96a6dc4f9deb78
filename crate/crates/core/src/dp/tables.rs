use crate::alphabet::Symbol;
use crate::model::ModelParams;
use crate::scalar::Real;

/// Flat copy of a model laid out for the inner loops. `col[e]` is column `e`
/// of `pi`, i.e. the weights of the three predecessor states flowing into `e`.
#[derive(Clone, Debug)]
pub(crate) struct Tables<T> {
    pub col: [[T; 3]; 3],
    pub row: [[T; 3]; 3],
    pub mu: [T; 3],
    pub k: usize,
    pub f: Vec<T>,
    pub g: Vec<T>,
    pub h: Vec<T>,
    pub hx: Vec<T>,
    pub hy: Vec<T>,
}

impl<T: Real> Tables<T> {
    pub fn new(theta: &ModelParams<T>) -> Self {
        let pi = *theta.pi().entries();
        let mut col = [[T::zero(); 3]; 3];
        for (from, row) in pi.iter().enumerate() {
            for (to, &p) in row.iter().enumerate() {
                col[to][from] = p;
            }
        }
        let e = theta.emissions();
        Tables {
            col,
            row: pi,
            mu: theta.mu(),
            k: e.size(),
            f: e.f_table().to_vec(),
            g: e.g_table().to_vec(),
            h: e.h_table().to_vec(),
            hx: e.h_x(),
            hy: e.h_y(),
        }
    }

    pub fn for_model(theta: &ModelParams<T>, mirrored: bool) -> Self {
        if mirrored {
            Tables::new(&theta.mirrored())
        } else {
            Tables::new(theta)
        }
    }
}

/// Emission factors along the lattice; positions are 1-based (`x(i)` is the
/// factor for emitting `x_i`).
pub(crate) trait Emit<T> {
    fn x(&self, i: usize) -> T;
    fn y(&self, j: usize) -> T;
    fn xy(&self, i: usize, j: usize) -> T;
    /// Diagonal step past the end of `y`: only `x_i` is observed.
    fn x_only(&self, i: usize) -> T;
    /// Diagonal step past the end of `x`: only `y_j` is observed.
    fn y_only(&self, j: usize) -> T;
    /// The factors of an `n` by `m` lattice laid out per row.
    fn lanes(&self, n: usize, m: usize) -> Lanes<T>;
}

/// Row-major emission factors. Row `i` uses `x[i - 1]` and the diagonal lane
/// `xy[class[i - 1]]`; lanes are indexed by column `j - 1`.
pub(crate) struct Lanes<T> {
    pub x: Vec<T>,
    pub y: Vec<T>,
    pub class: Vec<usize>,
    pub xy: Vec<Vec<T>>,
}

pub(crate) struct SeqEmit<'a, T> {
    pub tab: &'a Tables<T>,
    pub x: &'a [Symbol],
    pub y: &'a [Symbol],
}

impl<T: Real> Emit<T> for SeqEmit<'_, T> {
    #[inline(always)]
    fn x(&self, i: usize) -> T {
        self.tab.f[self.x[i - 1] as usize]
    }

    #[inline(always)]
    fn y(&self, j: usize) -> T {
        self.tab.g[self.y[j - 1] as usize]
    }

    #[inline(always)]
    fn xy(&self, i: usize, j: usize) -> T {
        self.tab.h[self.x[i - 1] as usize * self.tab.k + self.y[j - 1] as usize]
    }

    #[inline(always)]
    fn x_only(&self, i: usize) -> T {
        self.tab.hx[self.x[i - 1] as usize]
    }

    #[inline(always)]
    fn y_only(&self, j: usize) -> T {
        self.tab.hy[self.y[j - 1] as usize]
    }

    fn lanes(&self, n: usize, m: usize) -> Lanes<T> {
        let k = self.tab.k;
        let ys = &self.y[..m];
        Lanes {
            x: self.x[..n].iter().map(|&a| self.tab.f[a as usize]).collect(),
            y: ys.iter().map(|&b| self.tab.g[b as usize]).collect(),
            class: self.x[..n].iter().map(|&a| a as usize).collect(),
            xy: (0..k)
                .map(|a| ys.iter().map(|&b| self.tab.h[a * k + b as usize]).collect())
                .collect(),
        }
    }
}

/// All emission factors equal to one: the recursions then compute probabilities
/// of the hidden walk alone.
pub(crate) struct UnitEmit;

impl<T: Real> Emit<T> for UnitEmit {
    #[inline(always)]
    fn x(&self, _: usize) -> T {
        T::one()
    }
    #[inline(always)]
    fn y(&self, _: usize) -> T {
        T::one()
    }
    #[inline(always)]
    fn xy(&self, _: usize, _: usize) -> T {
        T::one()
    }
    #[inline(always)]
    fn x_only(&self, _: usize) -> T {
        T::one()
    }
    #[inline(always)]
    fn y_only(&self, _: usize) -> T {
        T::one()
    }

    fn lanes(&self, n: usize, m: usize) -> Lanes<T> {
        Lanes {
            x: vec![T::one(); n],
            y: vec![T::one(); m],
            class: vec![0; n],
            xy: vec![vec![T::one(); m]],
        }
    }
}
