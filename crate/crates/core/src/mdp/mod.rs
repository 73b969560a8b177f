//! Labeled MDPs, their JSON form and the battery-constrained gridworld.

mod gridworld;
mod io;

pub use gridworld::{build_gridworld, Cell, Direction, DriftCell, GridState, GridworldConfig, GridworldError};
pub use io::{DistEntry, MdpDocument, StateDoc, TransitionDoc};

use crate::scltl::{escape, Alphabet, AlphabetError, Symbol};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use thiserror::Error;

/// Tolerance on distribution sums.
pub const PROB_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MdpError {
    #[error("malformed MDP document: {0}")]
    Schema(String),
    #[error(transparent)]
    Alphabet(#[from] AlphabetError),
    #[error("state {state:?} action {action:?}: probabilities sum to {sum}")]
    NotStochastic { state: String, action: String, sum: f64 },
    #[error("state {state:?} action {action:?}: negative probability {prob}")]
    NegativeProbability { state: String, action: String, prob: f64 },
    #[error("reference to unknown {kind} {name:?}")]
    Dangling { kind: &'static str, name: String },
    #[error("duplicate {kind} {name:?}")]
    Duplicate { kind: &'static str, name: String },
    #[error("state {0:?} has no actions")]
    NoActions(String),
    #[error("initial distribution sums to {0}")]
    BadInitial(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ActionId(pub u32);

/// One enabled action at a state together with its successor distribution.
#[derive(Clone, Debug, PartialEq)]
pub struct Choice {
    pub action: ActionId,
    pub succ: Vec<(usize, f64)>,
}

/// Bare transition structure shared by every MDP in the pipeline. States are
/// `0..len`; each row lists the enabled actions in ascending order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MdpGraph {
    rows: Vec<Vec<Choice>>,
}

impl MdpGraph {
    pub fn new(rows: Vec<Vec<Choice>>) -> Self {
        let mut rows = rows;
        for r in &mut rows {
            r.sort_by_key(|c| c.action);
        }
        MdpGraph { rows }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn choices(&self, s: usize) -> &[Choice] {
        &self.rows[s]
    }

    pub fn choice(&self, s: usize, a: ActionId) -> Option<&Choice> {
        self.rows[s].binary_search_by_key(&a, |c| c.action).ok().map(|i| &self.rows[s][i])
    }

    /// Whether every choice at `s` is a certain self-loop.
    pub fn is_absorbing(&self, s: usize) -> bool {
        self.rows[s].iter().all(|c| c.succ.iter().all(|&(t, p)| t == s || p == 0.0))
    }

    /// Predecessor lists: for each state, the `(source, row index)` pairs with a
    /// positive-probability edge into it.
    pub fn predecessors(&self) -> Vec<Vec<(usize, usize)>> {
        let mut pre = vec![Vec::new(); self.rows.len()];
        for (s, row) in self.rows.iter().enumerate() {
            for (ci, c) in row.iter().enumerate() {
                for &(t, p) in &c.succ {
                    if p > 0.0 {
                        pre[t].push((s, ci));
                    }
                }
            }
        }
        for p in &mut pre {
            p.dedup();
        }
        pre
    }
}

/// A finite labeled MDP with named states and actions.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledMdp {
    alphabet: Alphabet,
    state_names: Vec<String>,
    labels: Vec<Symbol>,
    action_names: Vec<String>,
    graph: MdpGraph,
    initial: Vec<(usize, f64)>,
}

impl LabeledMdp {
    /// Assembles an MDP from validated parts. Panics if the parts disagree in
    /// size; use [`LabeledMdp::from_document`] for untrusted input.
    pub fn from_parts(
        alphabet: Alphabet,
        state_names: Vec<String>,
        labels: Vec<Symbol>,
        action_names: Vec<String>,
        graph: MdpGraph,
        initial: Vec<(usize, f64)>,
    ) -> Self {
        assert_eq!(state_names.len(), labels.len());
        assert_eq!(state_names.len(), graph.len());
        LabeledMdp { alphabet, state_names, labels, action_names, graph, initial }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn len(&self) -> usize {
        self.state_names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.state_names.is_empty()
    }

    pub fn graph(&self) -> &MdpGraph {
        &self.graph
    }

    pub fn state_name(&self, s: usize) -> &str {
        &self.state_names[s]
    }

    pub fn find_state(&self, name: &str) -> Option<usize> {
        self.state_names.iter().position(|n| n == name)
    }

    pub fn label(&self, s: usize) -> Symbol {
        self.labels[s]
    }

    pub fn actions(&self) -> &[String] {
        &self.action_names
    }

    pub fn action_name(&self, a: ActionId) -> &str {
        &self.action_names[a.0 as usize]
    }

    pub fn find_action(&self, name: &str) -> Option<ActionId> {
        self.action_names.iter().position(|n| n == name).map(|i| ActionId(i as u32))
    }

    pub fn initial(&self) -> &[(usize, f64)] {
        &self.initial
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph mdp {\n");
        for s in 0..self.len() {
            let label = format!("{}\\n{}", escape(&self.state_names[s]), self.alphabet.format_symbol(self.labels[s]));
            let _ = writeln!(out, "  s{s} [label=\"{label}\"];");
        }
        for s in 0..self.len() {
            for c in self.graph.choices(s) {
                for &(t, p) in &c.succ {
                    let _ = writeln!(
                        out,
                        "  s{s} -> s{t} [label=\"{} {p}\"];",
                        escape(self.action_name(c.action))
                    );
                }
            }
        }
        out.push_str("}\n");
        out
    }
}
