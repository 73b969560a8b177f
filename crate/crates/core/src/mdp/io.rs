use super::{ActionId, Choice, LabeledMdp, MdpError, MdpGraph, PROB_TOLERANCE};
use crate::scltl::Alphabet;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateDoc {
    pub id: String,
    #[serde(default)]
    pub label: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistEntry {
    pub state: String,
    pub prob: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransitionDoc {
    pub from: String,
    pub action: String,
    pub to: Vec<DistEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MdpDocument {
    pub atoms: Vec<String>,
    pub states: Vec<StateDoc>,
    pub actions: Vec<String>,
    pub transitions: Vec<TransitionDoc>,
    pub initial: Vec<DistEntry>,
}

impl LabeledMdp {
    pub fn from_json(text: &str) -> Result<Self, MdpError> {
        let doc: MdpDocument = serde_json::from_str(text).map_err(|e| MdpError::Schema(e.to_string()))?;
        Self::from_document(&doc)
    }

    /// Validates and loads a document. Distributions within tolerance of 1 are
    /// renormalized; repeated successor entries are summed.
    pub fn from_document(doc: &MdpDocument) -> Result<Self, MdpError> {
        let alphabet = Alphabet::new(doc.atoms.iter().cloned())?;
        let mut state_ix: HashMap<&str, usize> = HashMap::new();
        let mut labels = Vec::with_capacity(doc.states.len());
        for (i, s) in doc.states.iter().enumerate() {
            if state_ix.insert(s.id.as_str(), i).is_some() {
                return Err(MdpError::Duplicate { kind: "state", name: s.id.clone() });
            }
            let sym = alphabet.symbol(&s.label).map_err(|_| MdpError::Dangling {
                kind: "atom",
                name: s.label.iter().find(|p| !alphabet.contains(p)).cloned().unwrap_or_default(),
            })?;
            labels.push(sym);
        }
        let mut action_ix: HashMap<&str, u32> = HashMap::new();
        for (i, a) in doc.actions.iter().enumerate() {
            if action_ix.insert(a.as_str(), i as u32).is_some() {
                return Err(MdpError::Duplicate { kind: "action", name: a.clone() });
            }
        }
        let state = |name: &str| {
            state_ix.get(name).copied().ok_or_else(|| MdpError::Dangling { kind: "state", name: name.to_string() })
        };
        let dist = |entries: &[DistEntry], st: &str, act: &str| -> Result<Vec<(usize, f64)>, MdpError> {
            let mut out: Vec<(usize, f64)> = Vec::new();
            for e in entries {
                if e.prob.is_nan() || e.prob < 0.0 {
                    return Err(MdpError::NegativeProbability { state: st.into(), action: act.into(), prob: e.prob });
                }
                let t = state(&e.state)?;
                match out.iter_mut().find(|(x, _)| *x == t) {
                    Some((_, p)) => *p += e.prob,
                    None => out.push((t, e.prob)),
                }
            }
            let sum: f64 = out.iter().map(|(_, p)| p).sum();
            if (sum - 1.0).abs() > PROB_TOLERANCE {
                return Err(MdpError::NotStochastic { state: st.into(), action: act.into(), sum });
            }
            out.retain(|&(_, p)| p > 0.0);
            out.sort_by_key(|&(t, _)| t);
            Ok(out)
        };

        let mut rows: Vec<Vec<Choice>> = vec![Vec::new(); doc.states.len()];
        for t in &doc.transitions {
            let s = state(&t.from)?;
            let a = *action_ix
                .get(t.action.as_str())
                .ok_or_else(|| MdpError::Dangling { kind: "action", name: t.action.clone() })?;
            if rows[s].iter().any(|c| c.action == ActionId(a)) {
                return Err(MdpError::Duplicate { kind: "transition", name: format!("{} {}", t.from, t.action) });
            }
            let succ = dist(&t.to, &t.from, &t.action)?;
            rows[s].push(Choice { action: ActionId(a), succ });
        }
        if let Some(s) = rows.iter().position(|r| r.is_empty()) {
            return Err(MdpError::NoActions(doc.states[s].id.clone()));
        }
        let mut initial: Vec<(usize, f64)> = Vec::new();
        for e in &doc.initial {
            let s = state(&e.state)?;
            if e.prob.is_nan() || e.prob < 0.0 {
                return Err(MdpError::BadInitial(e.prob));
            }
            match initial.iter_mut().find(|(x, _)| *x == s) {
                Some((_, p)) => *p += e.prob,
                None => initial.push((s, e.prob)),
            }
        }
        let sum: f64 = initial.iter().map(|(_, p)| p).sum();
        if (sum - 1.0).abs() > PROB_TOLERANCE {
            return Err(MdpError::BadInitial(sum));
        }
        initial.retain(|&(_, p)| p > 0.0);
        Ok(LabeledMdp::from_parts(
            alphabet,
            doc.states.iter().map(|s| s.id.clone()).collect(),
            labels,
            doc.actions.clone(),
            MdpGraph::new(rows),
            initial,
        ))
    }

    pub fn to_document(&self) -> MdpDocument {
        let ab = self.alphabet();
        let name = |s: usize| self.state_name(s).to_string();
        let mut transitions = Vec::new();
        for s in 0..self.len() {
            for c in self.graph().choices(s) {
                transitions.push(TransitionDoc {
                    from: name(s),
                    action: self.action_name(c.action).to_string(),
                    to: c.succ.iter().map(|&(t, p)| DistEntry { state: name(t), prob: p }).collect(),
                });
            }
        }
        MdpDocument {
            atoms: ab.names().to_vec(),
            states: (0..self.len())
                .map(|s| StateDoc { id: name(s), label: ab.props_of(self.label(s)) })
                .collect(),
            actions: self.actions().to_vec(),
            transitions,
            initial: self.initial().iter().map(|&(s, p)| DistEntry { state: name(s), prob: p }).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO: &str = r#"{"atoms":["g"],"states":[{"id":"s0"},{"id":"s1","label":["g"]}],
        "actions":["a"],"transitions":[{"from":"s0","action":"a","to":[{"state":"s1","prob":1.0}]},
        {"from":"s1","action":"a","to":[{"state":"s1","prob":1.0}]}],"initial":[{"state":"s0","prob":1.0}]}"#;

    #[test]
    fn minimal_document_loads() {
        let m = LabeledMdp::from_json(TWO).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m.graph().choices(0)[0].succ, vec![(1, 1.0)]);
        assert_eq!(m.alphabet().props_of(m.label(1)), vec!["g"]);
        let back = LabeledMdp::from_document(&m.to_document()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn rejects_substochastic() {
        let bad = TWO.replacen("\"prob\":1.0}]},", "\"prob\":0.8}]},", 1);
        assert!(matches!(LabeledMdp::from_json(&bad), Err(MdpError::NotStochastic { .. })));
    }

    #[test]
    fn rejects_unknown_atom() {
        let bad = TWO.replace("\"label\":[\"g\"]", "\"label\":[\"h\"]");
        assert!(matches!(LabeledMdp::from_json(&bad), Err(MdpError::Dangling { kind: "atom", .. })));
    }

    #[test]
    fn rejects_dangling_and_missing_actions() {
        let bad = TWO.replace("{\"state\":\"s1\",\"prob\":1.0}]},\n", "{\"state\":\"s9\",\"prob\":1.0}]},\n");
        assert!(matches!(LabeledMdp::from_json(&bad), Err(MdpError::Dangling { kind: "state", .. })));
        let none = r#"{"atoms":[],"states":[{"id":"s0"}],"actions":["a"],"transitions":[],
            "initial":[{"state":"s0","prob":1.0}]}"#;
        assert!(matches!(LabeledMdp::from_json(none), Err(MdpError::NoActions(_))));
        assert!(matches!(LabeledMdp::from_json("{"), Err(MdpError::Schema(_))));
    }

    #[test]
    fn keeps_probabilities_within_tolerance() {
        let near = TWO.replacen("\"prob\":1.0}]},", "\"prob\":0.9999999999}]},", 1);
        let m = LabeledMdp::from_json(&near).unwrap();
        assert_eq!(m.graph().choices(0)[0].succ, vec![(1, 0.9999999999)]);
    }
}
