use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An ordered set of single-character symbols. Sequences are stored as indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Alphabet {
    symbols: Vec<char>,
}

pub type Symbol = u8;

impl Alphabet {
    pub fn new(symbols: impl IntoIterator<Item = char>) -> Result<Self> {
        let symbols: Vec<char> = symbols.into_iter().collect();
        if symbols.is_empty() {
            return Err(Error::InvalidParameter("alphabet is empty".into()));
        }
        if symbols.len() > Symbol::MAX as usize + 1 {
            return Err(Error::InvalidParameter("alphabet has more than 256 symbols".into()));
        }
        for (i, c) in symbols.iter().enumerate() {
            if c.is_whitespace() || *c == '>' {
                return Err(Error::InvalidParameter(format!("symbol {c:?} is reserved")));
            }
            if symbols[..i].contains(c) {
                return Err(Error::InvalidParameter(format!("duplicate symbol {c:?}")));
            }
        }
        Ok(Alphabet { symbols })
    }

    pub fn dna() -> Self {
        Alphabet {
            symbols: vec!['A', 'C', 'G', 'T'],
        }
    }

    pub fn size(&self) -> usize {
        self.symbols.len()
    }

    pub fn symbols(&self) -> &[char] {
        &self.symbols
    }

    pub fn index_of(&self, c: char) -> Option<Symbol> {
        self.symbols.iter().position(|&s| s == c).map(|i| i as Symbol)
    }

    pub fn symbol(&self, index: Symbol) -> char {
        self.symbols[index as usize]
    }

    pub fn encode(&self, text: &str) -> Result<Vec<Symbol>> {
        text.chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| self.index_of(c).ok_or(Error::UnknownSymbol { symbol: c }))
            .collect()
    }

    pub fn decode(&self, seq: &[Symbol]) -> String {
        seq.iter().map(|&s| self.symbol(s)).collect()
    }
}

impl Default for Alphabet {
    fn default() -> Self {
        Alphabet::dna()
    }
}

impl TryFrom<String> for Alphabet {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        Alphabet::new(s.chars())
    }
}

impl From<Alphabet> for String {
    fn from(a: Alphabet) -> String {
        a.symbols.into_iter().collect()
    }
}
