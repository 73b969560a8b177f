//! Syntactically co-safe LTL: parsing, progression, finite-trace semantics and
//! compilation into complete DFAs whose accepting states are absorbing.

mod canon;
mod dfa;
mod formula;
mod oracle;
mod parser;
mod progress;

pub use canon::canonicalize;
pub use dfa::{to_dfa, to_dfa_with_cap, Dfa, DfaDocument, DfaError, DfaTransition, DEFAULT_STATE_CAP};
pub(crate) use dfa::escape;
pub use formula::Formula;
pub use oracle::good_prefix_oracle;
pub use parser::{parse, ParseError};
pub use progress::progress;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest number of propositions whose power-set alphabet we enumerate.
pub const MAX_PROPOSITIONS: usize = 16;

/// Words reserved by the concrete syntax. `X` and `F` are not listed: they are
/// resolved by position and may double as proposition names.
const RESERVED: &[&str] = &["true", "false", "U"];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlphabetError {
    #[error("invalid proposition name {0:?}")]
    InvalidName(String),
    #[error("proposition {0:?} is a reserved keyword")]
    Reserved(String),
    #[error("proposition {0:?} declared twice")]
    Duplicate(String),
    #[error("unknown proposition {0:?}")]
    Unknown(String),
}

/// A declared, ordered set of atomic propositions. The alphabet of every
/// automaton over it is the power set, encoded as bitmasks in declaration order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct Alphabet {
    names: Vec<String>,
}

/// One letter of `2^AP`: bit `i` set iff the `i`-th declared proposition holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Symbol(pub u32);

impl Symbol {
    pub const EMPTY: Symbol = Symbol(0);

    pub fn contains(self, index: usize) -> bool {
        self.0 & (1 << index) != 0
    }

    pub fn with(self, index: usize) -> Symbol {
        Symbol(self.0 | (1 << index))
    }

    pub fn is_subset_of(self, other: Symbol) -> bool {
        self.0 & !other.0 == 0
    }
}

impl Alphabet {
    pub fn new<I, S>(names: I) -> Result<Self, AlphabetError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut out: Vec<String> = Vec::new();
        for name in names {
            let name = name.into();
            if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(AlphabetError::InvalidName(name));
            }
            if RESERVED.contains(&name.as_str()) {
                return Err(AlphabetError::Reserved(name));
            }
            if out.contains(&name) {
                return Err(AlphabetError::Duplicate(name));
            }
            out.push(name);
        }
        Ok(Alphabet { names: out })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index_of(name).is_some()
    }

    /// Number of letters, `2^|AP|`.
    pub fn symbol_count(&self) -> usize {
        1usize << self.names.len()
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> {
        (0..self.symbol_count() as u32).map(Symbol)
    }

    pub fn holds(&self, sym: Symbol, name: &str) -> bool {
        self.index_of(name).is_some_and(|i| sym.contains(i))
    }

    pub fn symbol<I, S>(&self, props: I) -> Result<Symbol, AlphabetError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut sym = Symbol::EMPTY;
        for p in props {
            let p = p.as_ref();
            let i = self.index_of(p).ok_or_else(|| AlphabetError::Unknown(p.to_string()))?;
            sym = sym.with(i);
        }
        Ok(sym)
    }

    /// The propositions of a letter, sorted by name.
    pub fn props_of(&self, sym: Symbol) -> Vec<String> {
        let mut v: Vec<String> = self
            .names
            .iter()
            .enumerate()
            .filter(|(i, _)| sym.contains(*i))
            .map(|(_, n)| n.clone())
            .collect();
        v.sort();
        v
    }

    pub fn format_symbol(&self, sym: Symbol) -> String {
        format!("{{{}}}", self.props_of(sym).join(","))
    }

    pub fn is_valid(&self, sym: Symbol) -> bool {
        (sym.0 as usize) < self.symbol_count()
    }
}

impl TryFrom<Vec<String>> for Alphabet {
    type Error = AlphabetError;

    fn try_from(v: Vec<String>) -> Result<Self, Self::Error> {
        Alphabet::new(v)
    }
}

impl From<Alphabet> for Vec<String> {
    fn from(a: Alphabet) -> Self {
        a.names
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alphabet_rejects_bad_names() {
        assert!(matches!(Alphabet::new(["a", "a"]), Err(AlphabetError::Duplicate(_))));
        assert!(matches!(Alphabet::new(["true"]), Err(AlphabetError::Reserved(_))));
        assert!(matches!(Alphabet::new(["U"]), Err(AlphabetError::Reserved(_))));
        assert!(matches!(Alphabet::new(["a-b"]), Err(AlphabetError::InvalidName(_))));
        assert!(matches!(Alphabet::new([""]), Err(AlphabetError::InvalidName(_))));
        assert!(Alphabet::new(["F", "X", "p_1"]).is_ok());
    }

    #[test]
    fn symbols_roundtrip_through_names() {
        let ab = Alphabet::new(["b", "a"]).unwrap();
        let s = ab.symbol(["a", "b"]).unwrap();
        assert_eq!(s, Symbol(0b11));
        assert_eq!(ab.props_of(s), vec!["a", "b"]);
        assert_eq!(ab.format_symbol(Symbol(0b01)), "{b}");
        assert_eq!(ab.symbols().count(), 4);
        assert!(ab.symbol(["c"]).is_err());
    }
}
