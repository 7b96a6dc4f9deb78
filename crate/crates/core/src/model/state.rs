use std::fmt;

use serde::{Deserialize, Serialize};

/// Hidden step of the alignment walk. The canonical ordering `H < V < D` is used
/// for every matrix index in the crate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum HiddenState {
    /// Horizontal step `(1, 0)`: emits one symbol of `x`.
    H,
    /// Vertical step `(0, 1)`: emits one symbol of `y`.
    V,
    /// Diagonal step `(1, 1)`: emits an aligned pair.
    D,
}

impl HiddenState {
    pub const ALL: [HiddenState; 3] = [HiddenState::H, HiddenState::V, HiddenState::D];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    #[inline]
    pub fn from_index(i: usize) -> HiddenState {
        Self::ALL[i]
    }

    /// Lattice increment `(dx, dy)`.
    #[inline]
    pub fn step(self) -> (usize, usize) {
        match self {
            HiddenState::H => (1, 0),
            HiddenState::V => (0, 1),
            HiddenState::D => (1, 1),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            HiddenState::H => 'H',
            HiddenState::V => 'V',
            HiddenState::D => 'D',
        }
    }

    pub fn from_char(c: char) -> Option<HiddenState> {
        match c {
            'H' => Some(HiddenState::H),
            'V' => Some(HiddenState::V),
            'D' => Some(HiddenState::D),
            _ => None,
        }
    }

    /// The state obtained by exchanging the roles of the two sequences.
    pub fn mirrored(self) -> HiddenState {
        match self {
            HiddenState::H => HiddenState::V,
            HiddenState::V => HiddenState::H,
            HiddenState::D => HiddenState::D,
        }
    }
}

impl fmt::Display for HiddenState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// Sum of steps along a path.
pub fn endpoint(path: &[HiddenState]) -> (usize, usize) {
    path.iter().fold((0, 0), |(n, m), s| {
        let (dx, dy) = s.step();
        (n + dx, m + dy)
    })
}

pub fn path_to_string(path: &[HiddenState]) -> String {
    path.iter().map(|s| s.as_char()).collect()
}

pub fn path_from_str(s: &str) -> Option<Vec<HiddenState>> {
    s.trim().chars().map(HiddenState::from_char).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn steps_and_indices() {
        assert_eq!(HiddenState::H.step(), (1, 0));
        assert_eq!(HiddenState::V.step(), (0, 1));
        assert_eq!(HiddenState::D.step(), (1, 1));
        for (i, s) in HiddenState::ALL.iter().enumerate() {
            assert_eq!(s.index(), i);
            assert_eq!(HiddenState::from_index(i), *s);
            assert_eq!(HiddenState::from_char(s.as_char()), Some(*s));
        }
        assert!(HiddenState::H < HiddenState::V && HiddenState::V < HiddenState::D);
    }

    #[test]
    fn path_round_trip() {
        let p = path_from_str("HVDDH").unwrap();
        assert_eq!(endpoint(&p), (4, 3));
        assert_eq!(path_to_string(&p), "HVDDH");
        assert!(path_from_str("HXD").is_none());
    }
}
