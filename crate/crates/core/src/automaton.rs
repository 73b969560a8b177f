//! The preference DFA: a product of outcome automata whose final states carry
//! x/y tags, grouped into nodes of a preference graph.

use crate::preference::{Comparison, OutcomeId, OutcomeSet, PreferenceSpec};
use crate::scltl::{escape, to_dfa_with_cap, Dfa, DfaError, Symbol, DEFAULT_STATE_CAP};
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, VecDeque};
use std::fmt::{self, Write as _};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PrefDfaError {
    #[error("outcome {name:?}: {source}")]
    Compile { name: String, source: DfaError },
    #[error("preference automaton exceeds the state cap of {0}")]
    StateCap(usize),
    #[error("letter {0} is outside the alphabet")]
    LetterOutsideAlphabet(u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TagKind {
    X,
    Y,
}

/// `x_ij` or `y_ij` for a strict pair `(i, j)` in `P`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Tag {
    pub kind: TagKind,
    pub i: OutcomeId,
    pub j: OutcomeId,
}

impl Tag {
    pub fn x(i: OutcomeId, j: OutcomeId) -> Self {
        Tag { kind: TagKind::X, i, j }
    }

    pub fn y(i: OutcomeId, j: OutcomeId) -> Self {
        Tag { kind: TagKind::Y, i, j }
    }

    pub fn display<'a>(&'a self, spec: &'a PreferenceSpec) -> impl fmt::Display + 'a {
        TagDisplay { tag: self, spec }
    }
}

struct TagDisplay<'a> {
    tag: &'a Tag,
    spec: &'a PreferenceSpec,
}

impl fmt::Display for TagDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = match self.tag.kind {
            TagKind::X => 'x',
            TagKind::Y => 'y',
        };
        write!(f, "{k}({},{})", self.spec.outcome(self.tag.i).name, self.spec.outcome(self.tag.j).name)
    }
}

/// Index of a node of the preference graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeId(pub usize);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrefNode {
    pub tags: Vec<Tag>,
    pub states: Vec<u32>,
}

#[derive(Clone, Debug)]
pub struct PreferenceDfa {
    spec: PreferenceSpec,
    components: Vec<Dfa>,
    tuples: Vec<Vec<u32>>,
    delta: Vec<u32>,
    sat: Vec<OutcomeSet>,
    tags: Vec<Vec<Tag>>,
    node_of: Vec<Option<NodeId>>,
    nodes: Vec<PrefNode>,
    edges: Vec<(NodeId, NodeId)>,
    edge_matrix: Vec<bool>,
}

/// Tags of a final state with satisfied set `sat`.
pub fn tags_for(spec: &PreferenceSpec, sat: OutcomeSet) -> Vec<Tag> {
    let mp = spec.mp(sat);
    let mut out = Vec::new();
    for (i, j) in spec.strict_pairs() {
        if sat.contains(i) && mp.contains(i) {
            out.push(Tag::x(i, j));
        }
        if !sat.contains(i) && sat.contains(j) && mp.contains(j) {
            out.push(Tag::y(i, j));
        }
    }
    out.sort();
    out
}

/// Edge rule between tag sets: `worse -> better` iff some pair witnesses it and
/// no pair witnesses the reverse.
pub fn edge_between(worse: &[Tag], better: &[Tag]) -> bool {
    let witness = |hi: &[Tag], lo: &[Tag]| {
        hi.iter().any(|t| t.kind == TagKind::X && lo.contains(&Tag::y(t.i, t.j)))
    };
    witness(better, worse) && !witness(worse, better)
}

impl PreferenceDfa {
    pub fn build(spec: &PreferenceSpec) -> Result<Self, PrefDfaError> {
        Self::build_with_cap(spec, DEFAULT_STATE_CAP)
    }

    pub fn build_with_cap(spec: &PreferenceSpec, cap: usize) -> Result<Self, PrefDfaError> {
        let ab = spec.alphabet();
        let components = spec
            .outcomes()
            .iter()
            .map(|o| {
                to_dfa_with_cap(&o.formula, ab, cap)
                    .map_err(|source| PrefDfaError::Compile { name: o.name.clone(), source })
            })
            .collect::<Result<Vec<_>, _>>()?;

        let k = ab.symbol_count();
        let mut index: HashMap<Vec<u32>, u32> = HashMap::new();
        let mut tuples: Vec<Vec<u32>> = Vec::new();
        let mut delta: Vec<u32> = Vec::new();
        let q0: Vec<u32> = components.iter().map(|d| d.initial()).collect();
        index.insert(q0.clone(), 0);
        tuples.push(q0);
        let mut queue = VecDeque::from([0u32]);
        while let Some(q) = queue.pop_front() {
            for s in ab.symbols() {
                let next: Vec<u32> =
                    tuples[q as usize].iter().zip(&components).map(|(&c, d)| d.step(c, s)).collect();
                let id = match index.get(&next) {
                    Some(&id) => id,
                    None => {
                        if tuples.len() >= cap {
                            return Err(PrefDfaError::StateCap(cap));
                        }
                        let id = tuples.len() as u32;
                        index.insert(next.clone(), id);
                        tuples.push(next);
                        queue.push_back(id);
                        id
                    }
                };
                delta.push(id);
            }
        }
        debug_assert_eq!(delta.len(), tuples.len() * k);

        let sat: Vec<OutcomeSet> = tuples
            .iter()
            .map(|t| {
                t.iter()
                    .zip(&components)
                    .enumerate()
                    .filter(|(_, (&c, d))| d.is_accepting(c))
                    .map(|(i, _)| OutcomeId(i))
                    .collect()
            })
            .collect();
        let tags: Vec<Vec<Tag>> =
            sat.iter().map(|&s| if s.is_empty() { Vec::new() } else { tags_for(spec, s) }).collect();

        let mut nodes: Vec<PrefNode> = Vec::new();
        let mut node_of = vec![None; tuples.len()];
        for q in 0..tuples.len() {
            if sat[q].is_empty() {
                continue;
            }
            let id = match nodes.iter().position(|n| n.tags == tags[q]) {
                Some(i) => i,
                None => {
                    nodes.push(PrefNode { tags: tags[q].clone(), states: Vec::new() });
                    nodes.len() - 1
                }
            };
            nodes[id].states.push(q as u32);
            node_of[q] = Some(NodeId(id));
        }
        let m = nodes.len();
        let mut edges = Vec::new();
        let mut edge_matrix = vec![false; m * m];
        for w in 0..m {
            for b in 0..m {
                if w != b && edge_between(&nodes[w].tags, &nodes[b].tags) {
                    edges.push((NodeId(w), NodeId(b)));
                    edge_matrix[w * m + b] = true;
                }
            }
        }
        Ok(PreferenceDfa {
            spec: spec.clone(),
            components,
            tuples,
            delta,
            sat,
            tags,
            node_of,
            nodes,
            edges,
            edge_matrix,
        })
    }

    pub fn spec(&self) -> &PreferenceSpec {
        &self.spec
    }

    pub fn components(&self) -> &[Dfa] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn initial(&self) -> u32 {
        0
    }

    pub fn step(&self, q: u32, s: Symbol) -> u32 {
        self.delta[q as usize * self.spec.alphabet().symbol_count() + s.0 as usize]
    }

    pub fn run(&self, word: &[Symbol]) -> Result<u32, PrefDfaError> {
        let ab = self.spec.alphabet();
        let mut q = 0;
        for &s in word {
            if !ab.is_valid(s) {
                return Err(PrefDfaError::LetterOutsideAlphabet(s.0));
            }
            q = self.step(q, s);
        }
        Ok(q)
    }

    /// Component states of product state `q`.
    pub fn tuple(&self, q: u32) -> &[u32] {
        &self.tuples[q as usize]
    }

    pub fn find_tuple(&self, t: &[u32]) -> Option<u32> {
        self.tuples.iter().position(|x| x == t).map(|i| i as u32)
    }

    pub fn is_final(&self, q: u32) -> bool {
        !self.sat[q as usize].is_empty()
    }

    pub fn final_count(&self) -> usize {
        self.sat.iter().filter(|s| !s.is_empty()).count()
    }

    /// Outcomes whose component is accepting at `q`.
    pub fn satisfied(&self, q: u32) -> OutcomeSet {
        self.sat[q as usize]
    }

    pub fn tags(&self, q: u32) -> &[Tag] {
        &self.tags[q as usize]
    }

    pub fn node_of(&self, q: u32) -> Option<NodeId> {
        self.node_of[q as usize]
    }

    pub fn nodes(&self) -> &[PrefNode] {
        &self.nodes
    }

    pub fn node(&self, n: NodeId) -> &PrefNode {
        &self.nodes[n.0]
    }

    pub fn node_by_tags(&self, tags: &[Tag]) -> Option<NodeId> {
        let mut t = tags.to_vec();
        t.sort();
        self.nodes.iter().position(|n| n.tags == t).map(NodeId)
    }

    /// Edges as `(worse, better)` pairs.
    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn has_edge(&self, worse: NodeId, better: NodeId) -> bool {
        self.edge_matrix[worse.0 * self.nodes.len() + better.0]
    }

    pub fn classify_word(&self, word: &[Symbol]) -> Result<Option<NodeId>, PrefDfaError> {
        Ok(self.node_of(self.run(word)?))
    }

    /// Graph-based comparison of two classifications; `None` means no outcome
    /// is satisfied and is related to nothing but itself.
    pub fn compare_nodes(&self, a: Option<NodeId>, b: Option<NodeId>) -> Comparison {
        match (a, b) {
            _ if a == b => Comparison::Indifferent,
            (Some(x), Some(y)) if self.has_edge(y, x) => Comparison::StrictlyBetter,
            (Some(x), Some(y)) if self.has_edge(x, y) => Comparison::StrictlyWorse,
            _ => Comparison::Incomparable,
        }
    }

    pub fn format_tags(&self, tags: &[Tag]) -> String {
        let v: Vec<String> = tags.iter().map(|t| t.display(&self.spec).to_string()).collect();
        format!("{{{}}}", v.join(", "))
    }

    pub fn state_label(&self, q: u32) -> String {
        let parts: Vec<&str> =
            self.tuple(q).iter().zip(&self.components).map(|(&c, d)| d.label(c)).collect();
        format!("({})", parts.join(", "))
    }

    pub fn to_document(&self) -> PreferenceDfaDocument {
        let ab = self.spec.alphabet();
        let tag_doc = |t: &Tag| TagDoc {
            kind: t.kind,
            better: self.spec.outcome(t.i).name.clone(),
            worse: self.spec.outcome(t.j).name.clone(),
        };
        let states = (0..self.len() as u32)
            .map(|q| PrefStateDoc {
                id: q,
                components: self.tuple(q).to_vec(),
                label: self.state_label(q),
                is_final: self.is_final(q),
                satisfied: self.satisfied(q).iter().map(|i| self.spec.outcome(i).name.clone()).collect(),
                tags: self.tags(q).iter().map(tag_doc).collect(),
                node: self.node_of(q).map(|n| n.0),
            })
            .collect();
        let mut transitions = Vec::with_capacity(self.delta.len());
        for q in 0..self.len() as u32 {
            for s in ab.symbols() {
                transitions.push(crate::scltl::DfaTransition { from: q, symbol: ab.props_of(s), to: self.step(q, s) });
            }
        }
        PreferenceDfaDocument {
            atoms: ab.names().to_vec(),
            outcomes: self.spec.outcomes().iter().map(|o| o.name.clone()).collect(),
            states,
            transitions,
            initial: 0,
            nodes: self
                .nodes
                .iter()
                .enumerate()
                .map(|(i, n)| NodeDoc { id: i, tags: n.tags.iter().map(tag_doc).collect(), states: n.states.clone() })
                .collect(),
            edges: self.edges.iter().map(|&(w, b)| EdgeDoc { worse: w.0, better: b.0 }).collect(),
        }
    }

    pub fn to_dot(&self) -> String {
        let ab = self.spec.alphabet();
        let mut out = String::from("digraph preference_dfa {\n  compound=true;\n");
        out.push_str("  subgraph cluster_automaton {\n    label=\"automaton\";\n    __start [shape=point];\n");
        for q in 0..self.len() as u32 {
            let shape = if self.is_final(q) { "doublecircle" } else { "circle" };
            let mut label = self.state_label(q);
            if self.is_final(q) {
                label.push_str("\\n");
                label.push_str(&escape(&self.format_tags(self.tags(q))));
            }
            let _ = writeln!(out, "    q{q} [shape={shape}, label=\"{}\"];", label);
        }
        out.push_str("    __start -> q0;\n");
        for q in 0..self.len() as u32 {
            let mut by_target: Vec<(u32, Vec<String>)> = Vec::new();
            for s in ab.symbols() {
                let t = self.step(q, s);
                let letter = ab.format_symbol(s);
                match by_target.iter_mut().find(|(x, _)| *x == t) {
                    Some((_, v)) => v.push(letter),
                    None => by_target.push((t, vec![letter])),
                }
            }
            for (t, letters) in by_target {
                let _ = writeln!(out, "    q{q} -> q{t} [label=\"{}\"];", escape(&letters.join(" ")));
            }
        }
        out.push_str("  }\n  subgraph cluster_graph {\n    label=\"preference graph\";\n");
        for (i, n) in self.nodes.iter().enumerate() {
            let _ = writeln!(out, "    X{i} [shape=box, label=\"X{i} {}\"];", escape(&self.format_tags(&n.tags)));
        }
        for &(w, b) in &self.edges {
            let _ = writeln!(out, "    X{} -> X{} [label=\"≺\"];", w.0, b.0);
        }
        out.push_str("  }\n}\n");
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TagDoc {
    pub kind: TagKind,
    pub better: String,
    pub worse: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrefStateDoc {
    pub id: u32,
    pub components: Vec<u32>,
    pub label: String,
    #[serde(rename = "final")]
    pub is_final: bool,
    pub satisfied: Vec<String>,
    pub tags: Vec<TagDoc>,
    pub node: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeDoc {
    pub id: usize,
    pub tags: Vec<TagDoc>,
    pub states: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeDoc {
    pub worse: usize,
    pub better: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreferenceDfaDocument {
    pub atoms: Vec<String>,
    pub outcomes: Vec<String>,
    pub states: Vec<PrefStateDoc>,
    pub transitions: Vec<crate::scltl::DfaTransition>,
    pub initial: u32,
    pub nodes: Vec<NodeDoc>,
    pub edges: Vec<EdgeDoc>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preference::{OutcomeDecl, PreferenceDeclarations, Statement};

    fn po1() -> PreferenceSpec {
        let outs = ["A", "B", "E"];
        PreferenceSpec::build(&PreferenceDeclarations {
            atoms: outs.iter().map(|s| s.to_string()).collect(),
            outcomes: outs.iter().map(|n| OutcomeDecl { name: n.to_string(), formula: format!("F {n}") }).collect(),
            preferences: vec![
                Statement::Strict { better: "B".into(), worse: "A".into() },
                Statement::Strict { better: "E".into(), worse: "A".into() },
            ],
        })
        .unwrap()
    }

    #[test]
    fn po1_shape() {
        let spec = po1();
        let p = PreferenceDfa::build(&spec).unwrap();
        assert_eq!(p.len(), 8);
        assert_eq!(p.final_count(), 7);
        assert!(!p.is_final(0));
        let (a, b, e) = (OutcomeId(0), OutcomeId(1), OutcomeId(2));
        let ab = spec.alphabet();
        let q = p.run(&[ab.symbol(["B"]).unwrap(), ab.symbol(["E"]).unwrap()]).unwrap();
        assert_eq!(p.tags(q), &[Tag::x(b, a), Tag::x(e, a)]);
        let only_a = p.classify_word(&[ab.symbol(["A"]).unwrap()]).unwrap().unwrap();
        assert_eq!(p.node(only_a).tags, vec![Tag::y(b, a), Tag::y(e, a)]);
        assert_eq!(p.classify_word(&[Symbol::EMPTY; 3]).unwrap(), None);
    }

    #[test]
    fn po1_edges() {
        let p = PreferenceDfa::build(&po1()).unwrap();
        let (a, b, e) = (OutcomeId(0), OutcomeId(1), OutcomeId(2));
        let xe = p.node_by_tags(&[Tag::x(e, a)]).unwrap();
        let xb = p.node_by_tags(&[Tag::x(b, a)]).unwrap();
        let ya = p.node_by_tags(&[Tag::y(e, a), Tag::y(b, a)]).unwrap();
        assert!(p.has_edge(ya, xe));
        assert!(!p.has_edge(xe, ya));
        assert!(!p.has_edge(xb, xe) && !p.has_edge(xe, xb));
        for &(w, b) in p.edges() {
            assert!(!p.has_edge(b, w));
        }
    }

    #[test]
    fn edge_rule_needs_a_witness() {
        let (a, b) = (OutcomeId(0), OutcomeId(1));
        assert!(edge_between(&[Tag::y(a, b)], &[Tag::x(a, b)]));
        assert!(!edge_between(&[Tag::x(a, b)], &[Tag::y(a, b)]));
        assert!(!edge_between(&[], &[Tag::x(a, b)]));
    }
}
