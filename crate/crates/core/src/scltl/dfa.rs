use super::{canonicalize, progress, Alphabet, Formula, Symbol, MAX_PROPOSITIONS};
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;
use thiserror::Error;

pub const DEFAULT_STATE_CAP: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DfaError {
    #[error("alphabet of {0} propositions exceeds the limit of {MAX_PROPOSITIONS}")]
    AlphabetTooLarge(usize),
    #[error("automaton exceeds the state cap of {0}")]
    StateCap(usize),
    #[error("letter {0} is outside the alphabet")]
    LetterOutsideAlphabet(u32),
    #[error("formula mentions undeclared proposition {0:?}")]
    Undeclared(String),
    #[error("malformed automaton document: {0}")]
    Document(String),
}

/// A complete DFA over `2^AP`. States are indexed `0..len`; transitions are
/// stored row-major, one row of `2^|AP|` successors per state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dfa {
    alphabet: Alphabet,
    labels: Vec<String>,
    delta: Vec<u32>,
    initial: u32,
    accepting: Vec<bool>,
}

impl Dfa {
    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn initial(&self) -> u32 {
        self.initial
    }

    /// Serialized formula standing for state `q`.
    pub fn label(&self, q: u32) -> &str {
        &self.labels[q as usize]
    }

    pub fn is_accepting(&self, q: u32) -> bool {
        self.accepting[q as usize]
    }

    pub fn accepting_states(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.len() as u32).filter(|&q| self.is_accepting(q))
    }

    pub fn step(&self, q: u32, sigma: Symbol) -> u32 {
        self.delta[q as usize * self.alphabet.symbol_count() + sigma.0 as usize]
    }

    pub fn run(&self, word: &[Symbol]) -> Result<u32, DfaError> {
        let mut q = self.initial;
        for &s in word {
            if !self.alphabet.is_valid(s) {
                return Err(DfaError::LetterOutsideAlphabet(s.0));
            }
            q = self.step(q, s);
        }
        Ok(q)
    }

    pub fn accepts(&self, word: &[Symbol]) -> Result<bool, DfaError> {
        Ok(self.is_accepting(self.run(word)?))
    }

    pub fn to_document(&self) -> DfaDocument {
        let ab = &self.alphabet;
        let mut transitions = Vec::with_capacity(self.delta.len());
        for q in 0..self.len() as u32 {
            for s in ab.symbols() {
                transitions.push(DfaTransition { from: q, symbol: ab.props_of(s), to: self.step(q, s) });
            }
        }
        DfaDocument {
            atoms: ab.names().to_vec(),
            states: self.labels.clone(),
            alphabet: ab.symbols().map(|s| ab.props_of(s)).collect(),
            transitions,
            initial: self.initial,
            accepting: self.accepting_states().collect(),
        }
    }

    /// Rebuilds a DFA from its JSON document, checking completeness and determinism.
    pub fn from_document(doc: &DfaDocument) -> Result<Dfa, DfaError> {
        let bad = |m: String| DfaError::Document(m);
        let alphabet = Alphabet::new(doc.atoms.iter().cloned()).map_err(|e| bad(e.to_string()))?;
        if alphabet.len() > MAX_PROPOSITIONS {
            return Err(DfaError::AlphabetTooLarge(alphabet.len()));
        }
        let n = doc.states.len();
        let k = alphabet.symbol_count();
        if n == 0 || doc.initial as usize >= n {
            return Err(bad("initial state out of range".into()));
        }
        let mut delta = vec![u32::MAX; n * k];
        for t in &doc.transitions {
            let s = alphabet.symbol(&t.symbol).map_err(|e| bad(e.to_string()))?;
            if t.from as usize >= n || t.to as usize >= n {
                return Err(bad(format!("transition {} -> {} out of range", t.from, t.to)));
            }
            let slot = &mut delta[t.from as usize * k + s.0 as usize];
            if *slot != u32::MAX {
                return Err(bad(format!("duplicate transition from {} on {:?}", t.from, t.symbol)));
            }
            *slot = t.to;
        }
        if let Some(i) = delta.iter().position(|&d| d == u32::MAX) {
            return Err(bad(format!("missing transition from state {} on letter {}", i / k, i % k)));
        }
        let mut accepting = vec![false; n];
        for &q in &doc.accepting {
            *accepting.get_mut(q as usize).ok_or_else(|| bad(format!("accepting state {q} out of range")))? =
                true;
        }
        Ok(Dfa { alphabet, labels: doc.states.clone(), delta, initial: doc.initial, accepting })
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph dfa {\n  rankdir=LR;\n  __start [shape=point];\n");
        for q in 0..self.len() as u32 {
            let shape = if self.is_accepting(q) { "doublecircle" } else { "circle" };
            let _ = writeln!(out, "  q{q} [shape={shape}, label=\"{}\"];", escape(self.label(q)));
        }
        let _ = writeln!(out, "  __start -> q{};", self.initial);
        for q in 0..self.len() as u32 {
            // Group letters with the same target into one edge.
            let mut by_target: Vec<(u32, Vec<String>)> = Vec::new();
            for s in self.alphabet.symbols() {
                let t = self.step(q, s);
                let letter = self.alphabet.format_symbol(s);
                match by_target.iter_mut().find(|(x, _)| *x == t) {
                    Some((_, v)) => v.push(letter),
                    None => by_target.push((t, vec![letter])),
                }
            }
            for (t, letters) in by_target {
                let _ = writeln!(out, "  q{q} -> q{t} [label=\"{}\"];", escape(&letters.join(" ")));
            }
        }
        out.push_str("}\n");
        out
    }
}

pub(crate) fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DfaTransition {
    pub from: u32,
    pub symbol: Vec<String>,
    pub to: u32,
}

/// JSON form of a [`Dfa`]. Letters are sorted proposition lists; `atoms` fixes
/// the declaration order so the document reloads to the same automaton.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DfaDocument {
    pub atoms: Vec<String>,
    pub states: Vec<String>,
    pub alphabet: Vec<Vec<String>>,
    pub transitions: Vec<DfaTransition>,
    pub initial: u32,
    pub accepting: Vec<u32>,
}

pub fn to_dfa(f: &Formula, alphabet: &Alphabet) -> Result<Dfa, DfaError> {
    to_dfa_with_cap(f, alphabet, DEFAULT_STATE_CAP)
}

/// Compiles `f` by breadth-first progression over every letter. States are
/// canonical forms; `true` is the only accepting state and `false` the sink.
pub fn to_dfa_with_cap(f: &Formula, alphabet: &Alphabet, cap: usize) -> Result<Dfa, DfaError> {
    if alphabet.len() > MAX_PROPOSITIONS {
        return Err(DfaError::AlphabetTooLarge(alphabet.len()));
    }
    if let Some(p) = f.propositions().into_iter().find(|p| !alphabet.contains(p)) {
        return Err(DfaError::Undeclared(p));
    }
    let k = alphabet.symbol_count();
    let mut index: HashMap<Formula, u32> = HashMap::new();
    let mut states: Vec<Formula> = Vec::new();
    let mut delta: Vec<u32> = Vec::new();
    let mut queue = VecDeque::new();

    let q0 = canonicalize(f);
    index.insert(q0.clone(), 0);
    states.push(q0);
    queue.push_back(0u32);
    while let Some(q) = queue.pop_front() {
        let cur = states[q as usize].clone();
        for s in alphabet.symbols() {
            let next = canonicalize(&progress(&cur, alphabet, s));
            let id = match index.get(&next) {
                Some(&id) => id,
                None => {
                    if states.len() >= cap {
                        return Err(DfaError::StateCap(cap));
                    }
                    let id = states.len() as u32;
                    index.insert(next.clone(), id);
                    states.push(next);
                    queue.push_back(id);
                    id
                }
            };
            delta.push(id);
        }
    }
    debug_assert_eq!(delta.len(), states.len() * k);
    let accepting = states.iter().map(Formula::is_true).collect();
    let labels = states.iter().map(|s| s.to_string()).collect();
    Ok(Dfa { alphabet: alphabet.clone(), labels, delta, initial: 0, accepting })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scltl::parse;

    #[test]
    fn eventually_has_two_states() {
        let ab = Alphabet::new(["A"]).unwrap();
        let d = to_dfa(&parse("F A", &ab).unwrap(), &ab).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.label(0), "F A");
        let a = ab.symbol(["A"]).unwrap();
        assert!(d.is_accepting(d.step(0, a)));
        assert_eq!(d.step(0, Symbol::EMPTY), 0);
        assert!(d.accepts(&[Symbol::EMPTY, a]).unwrap());
        assert!(!d.accepts(&[Symbol::EMPTY, Symbol::EMPTY]).unwrap());
        assert!(!d.accepts(&[]).unwrap());
    }

    #[test]
    fn atom_has_sink() {
        let ab = Alphabet::new(["A"]).unwrap();
        let d = to_dfa(&parse("A", &ab).unwrap(), &ab).unwrap();
        assert_eq!(d.len(), 3);
        let labels: Vec<&str> = (0..3).map(|q| d.label(q)).collect();
        assert!(labels.contains(&"true") && labels.contains(&"false"));
    }

    #[test]
    fn true_is_single_accepting_state() {
        let ab = Alphabet::new(["A"]).unwrap();
        let d = to_dfa(&Formula::True, &ab).unwrap();
        assert_eq!(d.len(), 1);
        assert!(d.accepts(&[]).unwrap());
    }

    #[test]
    fn rejects_letters_outside_alphabet() {
        let ab = Alphabet::new(["A"]).unwrap();
        let d = to_dfa(&Formula::True, &ab).unwrap();
        assert_eq!(d.accepts(&[Symbol(2)]), Err(DfaError::LetterOutsideAlphabet(2)));
    }

    #[test]
    fn guards() {
        let ab = Alphabet::new((0..17).map(|i| format!("p{i}"))).unwrap();
        assert_eq!(to_dfa(&Formula::True, &ab), Err(DfaError::AlphabetTooLarge(17)));
        let ab = Alphabet::new(["a", "b"]).unwrap();
        let f = parse("X X X a", &ab).unwrap();
        assert_eq!(to_dfa_with_cap(&f, &ab, 3), Err(DfaError::StateCap(3)));
    }

    #[test]
    fn document_roundtrip() {
        let ab = Alphabet::new(["a", "b"]).unwrap();
        let d = to_dfa(&parse("a U (b & X a)", &ab).unwrap(), &ab).unwrap();
        let doc = d.to_document();
        let json = serde_json::to_string(&doc).unwrap();
        let back: DfaDocument = serde_json::from_str(&json).unwrap();
        assert_eq!(Dfa::from_document(&back).unwrap(), d);
    }

    #[test]
    fn document_must_be_complete() {
        let ab = Alphabet::new(["a"]).unwrap();
        let mut doc = to_dfa(&parse("F a", &ab).unwrap(), &ab).unwrap().to_document();
        doc.transitions.pop();
        assert!(matches!(Dfa::from_document(&doc), Err(DfaError::Document(_))));
    }

    #[test]
    fn dot_marks_accepting() {
        let ab = Alphabet::new(["A"]).unwrap();
        let dot = to_dfa(&parse("F A", &ab).unwrap(), &ab).unwrap().to_dot();
        assert!(dot.contains("doublecircle"));
        assert!(dot.contains("label=\"F A\""));
    }
}
