//! Incomplete preferences over scLTL outcomes: the structure `<P, J>`, most
//! preferred subsets, and the comparison of outcome sets that every other
//! preference computation is checked against.

use crate::scltl::{parse, Alphabet, AlphabetError, Formula, ParseError};
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// Largest number of outcomes after indifference merging.
pub const MAX_OUTCOMES: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PreferenceError {
    #[error(transparent)]
    Alphabet(#[from] AlphabetError),
    #[error("outcome {name:?}: {source}")]
    Formula { name: String, source: ParseError },
    #[error("outcome name {0:?} is empty or declared twice")]
    BadOutcomeName(String),
    #[error("unknown outcome {0:?}")]
    UnknownOutcome(String),
    #[error("outcome {0:?} is compared with itself")]
    SelfComparison(String),
    #[error("contradictory statements: {0:?} is both strictly preferred and indifferent to {1:?}")]
    Contradiction(String, String),
    #[error("strict preferences form a cycle through {0:?}")]
    Cycle(String),
    #[error("at most {MAX_OUTCOMES} outcomes are supported, got {0}")]
    TooManyOutcomes(usize),
    #[error("no outcomes declared")]
    NoOutcomes,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeDecl {
    pub name: String,
    pub formula: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Statement {
    Strict { better: String, worse: String },
    Indifferent { left: String, right: String },
}

/// The preference file as written by a user.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreferenceDeclarations {
    pub atoms: Vec<String>,
    pub outcomes: Vec<OutcomeDecl>,
    #[serde(default)]
    pub preferences: Vec<Statement>,
}

/// Index of an outcome in the merged outcome list.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OutcomeId(pub usize);

/// A subset of the outcomes, as a bitmask over [`OutcomeId`]s.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OutcomeSet(pub u64);

impl OutcomeSet {
    pub const EMPTY: OutcomeSet = OutcomeSet(0);

    pub fn singleton(i: OutcomeId) -> Self {
        OutcomeSet(1 << i.0)
    }

    pub fn contains(self, i: OutcomeId) -> bool {
        self.0 & (1 << i.0) != 0
    }

    pub fn insert(&mut self, i: OutcomeId) {
        self.0 |= 1 << i.0;
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_subset_of(self, other: OutcomeSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = OutcomeId> {
        (0..64).filter(move |&i| self.0 & (1 << i) != 0).map(OutcomeId)
    }
}

impl FromIterator<OutcomeId> for OutcomeSet {
    fn from_iter<I: IntoIterator<Item = OutcomeId>>(iter: I) -> Self {
        let mut s = OutcomeSet::EMPTY;
        for i in iter {
            s.insert(i);
        }
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    StrictlyBetter,
    StrictlyWorse,
    Indifferent,
    Incomparable,
}

impl Comparison {
    pub fn flip(self) -> Self {
        match self {
            Comparison::StrictlyBetter => Comparison::StrictlyWorse,
            Comparison::StrictlyWorse => Comparison::StrictlyBetter,
            c => c,
        }
    }
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Comparison::StrictlyBetter => "strictly better",
            Comparison::StrictlyWorse => "strictly worse",
            Comparison::Indifferent => "indifferent",
            Comparison::Incomparable => "incomparable",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub name: String,
    pub formula: Formula,
}

/// A validated preference structure. `strict[i]` holds the outcomes that
/// outcome `i` is strictly preferred to; the relation is transitively closed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreferenceSpec {
    alphabet: Alphabet,
    outcomes: Vec<Outcome>,
    strict: Vec<OutcomeSet>,
}

impl PreferenceSpec {
    pub fn build(decl: &PreferenceDeclarations) -> Result<Self, PreferenceError> {
        let alphabet = Alphabet::new(decl.atoms.iter().cloned())?;
        if decl.outcomes.is_empty() {
            return Err(PreferenceError::NoOutcomes);
        }
        let mut formulas = Vec::with_capacity(decl.outcomes.len());
        for (k, o) in decl.outcomes.iter().enumerate() {
            if o.name.is_empty() || decl.outcomes[..k].iter().any(|p| p.name == o.name) {
                return Err(PreferenceError::BadOutcomeName(o.name.clone()));
            }
            let f = parse(&o.formula, &alphabet)
                .map_err(|source| PreferenceError::Formula { name: o.name.clone(), source })?;
            formulas.push(f);
        }
        let lookup = |name: &str| -> Result<usize, PreferenceError> {
            decl.outcomes
                .iter()
                .position(|o| o.name == name)
                .ok_or_else(|| PreferenceError::UnknownOutcome(name.to_string()))
        };

        // Merge indifference classes first.
        let n = decl.outcomes.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut strict_raw = Vec::new();
        for st in &decl.preferences {
            match st {
                Statement::Indifferent { left, right } => {
                    let (a, b) = (lookup(left)?, lookup(right)?);
                    if a == b {
                        return Err(PreferenceError::SelfComparison(left.clone()));
                    }
                    let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                    parent[ra.max(rb)] = ra.min(rb);
                }
                Statement::Strict { better, worse } => {
                    let (a, b) = (lookup(better)?, lookup(worse)?);
                    if a == b {
                        return Err(PreferenceError::SelfComparison(better.clone()));
                    }
                    strict_raw.push((a, b));
                }
            }
        }
        // Classes are numbered by their first declared member.
        let mut class_of = vec![usize::MAX; n];
        let mut members: Vec<Vec<usize>> = Vec::new();
        for i in 0..n {
            let r = find(&mut parent, i);
            if class_of[r] == usize::MAX {
                class_of[r] = members.len();
                members.push(Vec::new());
            }
            class_of[i] = class_of[r];
            members[class_of[i]].push(i);
        }
        let m = members.len();
        if m > MAX_OUTCOMES {
            return Err(PreferenceError::TooManyOutcomes(m));
        }
        let outcomes: Vec<Outcome> = members
            .iter()
            .map(|ms| Outcome {
                name: ms.iter().map(|&i| decl.outcomes[i].name.as_str()).collect::<Vec<_>>().join("|"),
                formula: Formula::balanced_or(ms.iter().map(|&i| formulas[i].clone()).collect())
                    .expect("classes are nonempty"),
            })
            .collect();

        let mut strict = vec![OutcomeSet::EMPTY; m];
        for &(a, b) in &strict_raw {
            let (ca, cb) = (class_of[a], class_of[b]);
            if ca == cb {
                return Err(PreferenceError::Contradiction(
                    decl.outcomes[a].name.clone(),
                    decl.outcomes[b].name.clone(),
                ));
            }
            strict[ca].insert(OutcomeId(cb));
        }
        for k in 0..m {
            for i in 0..m {
                if strict[i].contains(OutcomeId(k)) {
                    strict[i].0 |= strict[k].0;
                }
            }
        }
        if let Some(i) = (0..m).find(|&i| strict[i].contains(OutcomeId(i))) {
            return Err(PreferenceError::Cycle(outcomes[i].name.clone()));
        }
        Ok(PreferenceSpec { alphabet, outcomes, strict })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn outcome(&self, i: OutcomeId) -> &Outcome {
        &self.outcomes[i.0]
    }

    pub fn ids(&self) -> impl Iterator<Item = OutcomeId> {
        (0..self.outcomes.len()).map(OutcomeId)
    }

    pub fn find(&self, name: &str) -> Option<OutcomeId> {
        self.outcomes.iter().position(|o| o.name == name).map(OutcomeId)
    }

    pub fn all(&self) -> OutcomeSet {
        self.ids().collect()
    }

    /// `(i, j) in P`.
    pub fn prefers(&self, i: OutcomeId, j: OutcomeId) -> bool {
        self.strict[i.0].contains(j)
    }

    /// `(i, j) in J`.
    pub fn incomparable(&self, i: OutcomeId, j: OutcomeId) -> bool {
        i != j && !self.prefers(i, j) && !self.prefers(j, i)
    }

    pub fn strict_pairs(&self) -> Vec<(OutcomeId, OutcomeId)> {
        self.pairs(|i, j| self.prefers(i, j))
    }

    pub fn incomparable_pairs(&self) -> Vec<(OutcomeId, OutcomeId)> {
        self.pairs(|i, j| self.incomparable(i, j))
    }

    fn pairs(&self, keep: impl Fn(OutcomeId, OutcomeId) -> bool) -> Vec<(OutcomeId, OutcomeId)> {
        let mut v = Vec::new();
        for i in self.ids() {
            for j in self.ids() {
                if keep(i, j) {
                    v.push((i, j));
                }
            }
        }
        v
    }

    /// Maximal elements of `psi` under `P`.
    pub fn mp(&self, psi: OutcomeSet) -> OutcomeSet {
        psi.iter().filter(|&i| !psi.iter().any(|k| self.prefers(k, i))).collect()
    }

    /// Compares two words through their satisfied outcome sets. Both arguments
    /// are reduced to their most preferred elements first.
    pub fn compare(&self, a: OutcomeSet, b: OutcomeSet) -> Comparison {
        let (a, b) = (self.mp(a), self.mp(b));
        if a == b {
            return Comparison::Indifferent;
        }
        let beats = |x: OutcomeSet, y: OutcomeSet| {
            let some = x.iter().any(|i| y.iter().any(|j| self.prefers(i, j)));
            let none_back = !x.iter().any(|i| y.iter().any(|j| self.prefers(j, i)));
            some && none_back
        };
        if beats(a, b) {
            Comparison::StrictlyBetter
        } else if beats(b, a) {
            Comparison::StrictlyWorse
        } else {
            Comparison::Incomparable
        }
    }

    /// Declarations that rebuild to this exact spec: merged outcomes and the
    /// closed strict relation.
    pub fn declarations(&self) -> PreferenceDeclarations {
        PreferenceDeclarations {
            atoms: self.alphabet.names().to_vec(),
            outcomes: self
                .outcomes
                .iter()
                .map(|o| OutcomeDecl { name: o.name.clone(), formula: o.formula.to_string() })
                .collect(),
            preferences: self
                .strict_pairs()
                .into_iter()
                .map(|(i, j)| Statement::Strict {
                    better: self.outcomes[i.0].name.clone(),
                    worse: self.outcomes[j.0].name.clone(),
                })
                .collect(),
        }
    }

    pub fn format_set(&self, s: OutcomeSet) -> String {
        let names: Vec<&str> = s.iter().map(|i| self.outcomes[i.0].name.as_str()).collect();
        format!("{{{}}}", names.join(", "))
    }
}

/// JSON echo of a closed spec, as printed by the command-line tool.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpecReport {
    pub atoms: Vec<String>,
    pub outcomes: Vec<OutcomeDecl>,
    pub strict: Vec<(String, String)>,
    pub incomparable: Vec<(String, String)>,
}

impl From<&PreferenceSpec> for SpecReport {
    fn from(s: &PreferenceSpec) -> Self {
        let name = |i: OutcomeId| s.outcome(i).name.clone();
        SpecReport {
            atoms: s.alphabet.names().to_vec(),
            outcomes: s.declarations().outcomes,
            strict: s.strict_pairs().into_iter().map(|(i, j)| (name(i), name(j))).collect(),
            incomparable: s.incomparable_pairs().into_iter().map(|(i, j)| (name(i), name(j))).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decl(atoms: &[&str], outs: &[(&str, &str)], prefs: Vec<Statement>) -> PreferenceDeclarations {
        PreferenceDeclarations {
            atoms: atoms.iter().map(|s| s.to_string()).collect(),
            outcomes: outs
                .iter()
                .map(|(n, f)| OutcomeDecl { name: n.to_string(), formula: f.to_string() })
                .collect(),
            preferences: prefs,
        }
    }

    fn strict(b: &str, w: &str) -> Statement {
        Statement::Strict { better: b.into(), worse: w.into() }
    }

    fn indiff(l: &str, r: &str) -> Statement {
        Statement::Indifferent { left: l.into(), right: r.into() }
    }

    fn chain() -> PreferenceSpec {
        PreferenceSpec::build(&decl(
            &["a", "b", "c"],
            &[("a", "F a"), ("b", "F b"), ("c", "F c")],
            vec![strict("a", "b"), strict("b", "c")],
        ))
        .unwrap()
    }

    #[test]
    fn closure_is_transitive() {
        let s = chain();
        assert!(s.prefers(OutcomeId(0), OutcomeId(2)));
        assert!(s.incomparable_pairs().is_empty());
    }

    #[test]
    fn cycle_and_contradiction() {
        let outs = [("a", "F a"), ("b", "F b"), ("c", "F c")];
        let e = PreferenceSpec::build(&decl(&["a", "b", "c"], &outs, vec![strict("a", "b"), strict("b", "a")]));
        assert!(matches!(e, Err(PreferenceError::Cycle(_))));
        let e = PreferenceSpec::build(&decl(&["a", "b", "c"], &outs, vec![strict("a", "b"), indiff("b", "a")]));
        assert!(matches!(e, Err(PreferenceError::Contradiction(..))));
        let e = PreferenceSpec::build(&decl(
            &["a", "b", "c"],
            &outs,
            vec![strict("a", "b"), strict("b", "c"), indiff("a", "c")],
        ));
        assert!(matches!(e, Err(PreferenceError::Cycle(_))));
        let e = PreferenceSpec::build(&decl(&["a", "b", "c"], &outs, vec![strict("a", "z")]));
        assert!(matches!(e, Err(PreferenceError::UnknownOutcome(_))));
        let e = PreferenceSpec::build(&decl(&["a", "b", "c"], &outs, vec![strict("a", "a")]));
        assert!(matches!(e, Err(PreferenceError::SelfComparison(_))));
    }

    #[test]
    fn bad_formula_names_the_outcome() {
        let e = PreferenceSpec::build(&decl(&["a"], &[("x", "F q")], vec![]));
        assert!(matches!(e, Err(PreferenceError::Formula { ref name, .. }) if name == "x"));
    }

    #[test]
    fn mp_and_compare() {
        let s = chain();
        let all = s.all();
        assert_eq!(s.mp(all), OutcomeSet::singleton(OutcomeId(0)));
        assert_eq!(s.mp(OutcomeSet::EMPTY), OutcomeSet::EMPTY);
        let one = OutcomeSet::singleton(OutcomeId(1));
        assert_eq!(s.mp(one), one);
        assert_eq!(s.compare(all, one), Comparison::StrictlyBetter);
        assert_eq!(s.compare(one, all), Comparison::StrictlyWorse);
        assert_eq!(s.compare(one, one), Comparison::Indifferent);
        assert_eq!(s.compare(OutcomeSet::EMPTY, one), Comparison::Incomparable);
    }

    #[test]
    fn declarations_rebuild_identically() {
        let s = chain();
        assert_eq!(PreferenceSpec::build(&s.declarations()).unwrap(), s);
    }

    #[test]
    fn statements_use_kind_tags() {
        let j = r#"{"atoms":["a","b"],"outcomes":[{"name":"a","formula":"F a"},{"name":"b","formula":"F b"}],
            "preferences":[{"kind":"strict","better":"a","worse":"b"}]}"#;
        let d: PreferenceDeclarations = serde_json::from_str(j).unwrap();
        assert_eq!(d.preferences, vec![strict("a", "b")]);
    }
}
