use crate::automaton::{NodeId, PreferenceDfa};
use crate::mdp::{Choice, LabeledMdp, MdpGraph};
use crate::scltl::Symbol;
use std::collections::{HashMap, VecDeque};
use thiserror::Error;

pub const DEFAULT_PRODUCT_CAP: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProductError {
    #[error("MDP atom {0:?} is not declared by the preference file")]
    AlphabetMismatch(String),
    #[error("product exceeds the state cap of {0}")]
    StateCap(usize),
}

/// Reachable product of a labeled MDP with a preference DFA.
#[derive(Clone, Debug)]
pub struct ProductMdp {
    mdp: LabeledMdp,
    pdfa: PreferenceDfa,
    pairs: Vec<(usize, u32)>,
    index: HashMap<(usize, u32), usize>,
    graph: MdpGraph,
    initial: Vec<(usize, f64)>,
}

impl ProductMdp {
    pub fn build(mdp: &LabeledMdp, pdfa: &PreferenceDfa) -> Result<Self, ProductError> {
        Self::build_with_cap(mdp, pdfa, DEFAULT_PRODUCT_CAP)
    }

    pub fn build_with_cap(mdp: &LabeledMdp, pdfa: &PreferenceDfa, cap: usize) -> Result<Self, ProductError> {
        let pab = pdfa.spec().alphabet();
        let mab = mdp.alphabet();
        let mut remap = Vec::with_capacity(mab.len());
        for name in mab.names() {
            remap.push(pab.index_of(name).ok_or_else(|| ProductError::AlphabetMismatch(name.clone()))?);
        }
        let letters: Vec<Symbol> = (0..mdp.len())
            .map(|s| {
                let l = mdp.label(s);
                remap.iter().enumerate().filter(|(i, _)| l.contains(*i)).fold(Symbol::EMPTY, |acc, (_, &j)| acc.with(j))
            })
            .collect();

        let mut pairs: Vec<(usize, u32)> = Vec::new();
        let mut index: HashMap<(usize, u32), usize> = HashMap::new();
        let mut queue = VecDeque::new();
        let mut intern = |key: (usize, u32), pairs: &mut Vec<(usize, u32)>, queue: &mut VecDeque<usize>| {
            if let Some(&v) = index.get(&key) {
                return Ok(v);
            }
            if pairs.len() >= cap {
                return Err(ProductError::StateCap(cap));
            }
            let v = pairs.len();
            pairs.push(key);
            index.insert(key, v);
            queue.push_back(v);
            Ok(v)
        };
        let mut initial = Vec::new();
        for &(s0, p) in mdp.initial() {
            let v = intern((s0, pdfa.step(pdfa.initial(), letters[s0])), &mut pairs, &mut queue)?;
            initial.push((v, p));
        }
        let mut rows: Vec<Vec<Choice>> = Vec::new();
        while let Some(v) = queue.pop_front() {
            let (s, q) = pairs[v];
            let mut row = Vec::new();
            for c in mdp.graph().choices(s) {
                let mut succ = Vec::with_capacity(c.succ.len());
                for &(t, p) in &c.succ {
                    let w = intern((t, pdfa.step(q, letters[t])), &mut pairs, &mut queue)?;
                    succ.push((w, p));
                }
                row.push(Choice { action: c.action, succ });
            }
            debug_assert_eq!(rows.len(), v);
            rows.push(row);
        }
        let index = pairs.iter().enumerate().map(|(v, &k)| (k, v)).collect();
        Ok(ProductMdp { mdp: mdp.clone(), pdfa: pdfa.clone(), pairs, index, graph: MdpGraph::new(rows), initial })
    }

    pub fn mdp(&self) -> &LabeledMdp {
        &self.mdp
    }

    pub fn pdfa(&self) -> &PreferenceDfa {
        &self.pdfa
    }

    pub fn graph(&self) -> &MdpGraph {
        &self.graph
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pair(&self, v: usize) -> (usize, u32) {
        self.pairs[v]
    }

    pub fn find(&self, s: usize, q: u32) -> Option<usize> {
        self.index.get(&(s, q)).copied()
    }

    /// Product states whose MDP component has the given name.
    pub fn find_by_mdp_name(&self, name: &str) -> Vec<usize> {
        match self.mdp.find_state(name) {
            Some(s) => (0..self.len()).filter(|&v| self.pairs[v].0 == s).collect(),
            None => Vec::new(),
        }
    }

    pub fn initial(&self) -> &[(usize, f64)] {
        &self.initial
    }

    pub fn is_final(&self, v: usize) -> bool {
        self.pdfa.is_final(self.pairs[v].1)
    }

    /// The preference-graph node whose product block contains `v`.
    pub fn node_of(&self, v: usize) -> Option<NodeId> {
        self.pdfa.node_of(self.pairs[v].1)
    }

    pub fn node_count(&self) -> usize {
        self.pdfa.nodes().len()
    }

    /// Nodes with at least one reachable product state.
    pub fn present_nodes(&self) -> Vec<NodeId> {
        let mut seen = vec![false; self.node_count()];
        for v in 0..self.len() {
            if let Some(n) = self.node_of(v) {
                seen[n.0] = true;
            }
        }
        (0..seen.len()).filter(|&i| seen[i]).map(NodeId).collect()
    }

    /// Target indicator of the product block of node `n`.
    pub fn node_target(&self, n: NodeId) -> Vec<bool> {
        (0..self.len()).map(|v| self.node_of(v) == Some(n)).collect()
    }

    pub fn state_name(&self, v: usize) -> String {
        let (s, q) = self.pairs[v];
        format!("{}|q{}", self.mdp.state_name(s), q)
    }

    pub fn find_by_name(&self, name: &str) -> Option<usize> {
        let (s, q) = name.rsplit_once("|q")?;
        let q: u32 = q.parse().ok()?;
        self.find(self.mdp.find_state(s)?, q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::MdpDocument;
    use crate::preference::{OutcomeDecl, PreferenceDeclarations, PreferenceSpec};

    fn tiny() -> (LabeledMdp, PreferenceDfa) {
        let doc: MdpDocument = serde_json::from_str(
            r#"{"atoms":["g"],"states":[{"id":"s0"},{"id":"s1","label":["g"]}],"actions":["a"],
            "transitions":[{"from":"s0","action":"a","to":[{"state":"s0","prob":0.5},{"state":"s1","prob":0.5}]},
            {"from":"s1","action":"a","to":[{"state":"s1","prob":1.0}]}],"initial":[{"state":"s0","prob":1.0}]}"#,
        )
        .unwrap();
        let spec = PreferenceSpec::build(&PreferenceDeclarations {
            atoms: vec!["g".into(), "h".into()],
            outcomes: vec![OutcomeDecl { name: "g".into(), formula: "F g".into() }],
            preferences: vec![],
        })
        .unwrap();
        (LabeledMdp::from_document(&doc).unwrap(), PreferenceDfa::build(&spec).unwrap())
    }

    #[test]
    fn copies_probabilities_and_tracks_labels() {
        let (m, p) = tiny();
        let pm = ProductMdp::build(&m, &p).unwrap();
        assert!(pm.len() <= m.len() * p.len());
        assert_eq!(pm.len(), 2);
        let v0 = pm.initial()[0].0;
        assert_eq!(pm.pair(v0), (0, 0));
        let succ = &pm.graph().choices(v0)[0].succ;
        assert_eq!(succ.len(), 2);
        let v1 = succ.iter().find(|&&(w, _)| pm.pair(w).0 == 1).unwrap();
        assert_eq!(v1.1, 0.5);
        assert!(pm.is_final(v1.0));
        assert_eq!(pm.find_by_name(&pm.state_name(v1.0)), Some(v1.0));
    }

    #[test]
    fn initial_label_is_consumed() {
        let (m, p) = tiny();
        let mut doc = m.to_document();
        doc.initial = vec![crate::mdp::DistEntry { state: "s1".into(), prob: 1.0 }];
        let m = LabeledMdp::from_document(&doc).unwrap();
        let pm = ProductMdp::build(&m, &p).unwrap();
        assert!(pm.is_final(pm.initial()[0].0));
    }

    #[test]
    fn extra_mdp_atom_is_rejected() {
        let (m, p) = tiny();
        let mut doc = m.to_document();
        doc.atoms.push("zz".into());
        let m = LabeledMdp::from_document(&doc).unwrap();
        assert_eq!(ProductMdp::build(&m, &p).unwrap_err(), ProductError::AlphabetMismatch("zz".into()));
    }
}
