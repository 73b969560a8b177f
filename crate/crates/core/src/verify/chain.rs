use super::VerifyError;
use crate::mdp::{ActionId, Choice, MdpGraph};
use crate::synthesis::{almost_sure_for_all, Mode, Planner, Step, Strategy};
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, VecDeque};

const MAX_COUNTEREXAMPLES: usize = 10;

#[derive(Clone, Debug, PartialEq)]
pub struct ChainEdge {
    pub from: usize,
    pub to: usize,
    pub action: ActionId,
    pub prob: f64,
    pub step: Step,
    pub regressing: bool,
}

/// The process a set-valued strategy induces on the product, explored from
/// every state of its domain. States outside the domain are kept as leaves
/// without outgoing edges.
#[derive(Clone, Debug)]
pub struct InducedChain {
    states: Vec<usize>,
    index: HashMap<usize, usize>,
    expanded: Vec<bool>,
    edges: Vec<ChainEdge>,
    out: Vec<Vec<usize>>,
}

impl InducedChain {
    pub fn build(planner: &Planner, strategy: &Strategy) -> Result<Self, VerifyError> {
        let pm = planner.product();
        let mut chain = InducedChain {
            states: Vec::new(),
            index: HashMap::new(),
            expanded: Vec::new(),
            edges: Vec::new(),
            out: Vec::new(),
        };
        let mut queue = VecDeque::new();
        for v in strategy.domain() {
            chain.intern(v, &mut queue);
        }
        while let Some(i) = queue.pop_front() {
            let v = chain.states[i];
            let Some(actions) = strategy.at(v) else { continue };
            chain.expanded[i] = true;
            for &a in actions {
                let choice = pm.graph().choice(v, a).ok_or_else(|| VerifyError::Integrity {
                    state: pm.state_name(v),
                    action: pm.mdp().actions().get(a.0 as usize).cloned().unwrap_or_else(|| format!("#{}", a.0)),
                })?;
                for &(w, p) in &choice.succ {
                    if p <= 0.0 {
                        continue;
                    }
                    let j = chain.intern(w, &mut queue);
                    let e = ChainEdge {
                        from: i,
                        to: j,
                        action: a,
                        prob: p,
                        step: planner.step_kind(v, w),
                        regressing: planner.is_improvement(w, v),
                    };
                    chain.out[i].push(chain.edges.len());
                    chain.edges.push(e);
                }
            }
        }
        Ok(chain)
    }

    fn intern(&mut self, v: usize, queue: &mut VecDeque<usize>) -> usize {
        if let Some(&i) = self.index.get(&v) {
            return i;
        }
        let i = self.states.len();
        self.states.push(v);
        self.index.insert(v, i);
        self.expanded.push(false);
        self.out.push(Vec::new());
        queue.push_back(i);
        i
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Product state behind chain state `i`.
    pub fn product_state(&self, i: usize) -> usize {
        self.states[i]
    }

    pub fn edges(&self) -> &[ChainEdge] {
        &self.edges
    }

    pub fn outgoing(&self, i: usize) -> impl Iterator<Item = &ChainEdge> {
        self.out[i].iter().map(|&e| &self.edges[e])
    }

    /// Shortest edge path from `from` to the first state satisfying `accept`.
    fn path(&self, from: usize, accept: impl Fn(usize) -> bool) -> Option<Vec<usize>> {
        let mut parent: Vec<Option<usize>> = vec![None; self.len()];
        let mut seen = vec![false; self.len()];
        seen[from] = true;
        let mut queue = VecDeque::from([from]);
        while let Some(u) = queue.pop_front() {
            if accept(u) {
                let mut edges = Vec::new();
                let mut x = u;
                while let Some(e) = parent[x] {
                    edges.push(e);
                    x = self.edges[e].from;
                }
                edges.reverse();
                return Some(edges);
            }
            for &e in &self.out[u] {
                let t = self.edges[e].to;
                if !seen[t] {
                    seen[t] = true;
                    parent[t] = Some(e);
                    queue.push_back(t);
                }
            }
        }
        None
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub start: String,
    /// Product states visited from `start`, ending at the offending state.
    pub path: Vec<String>,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionResult {
    pub passed: bool,
    pub failures: usize,
    pub counterexamples: Vec<Counterexample>,
}

impl ConditionResult {
    fn from_failures(failures: usize, counterexamples: Vec<Counterexample>) -> Self {
        ConditionResult { passed: failures == 0, failures, counterexamples }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionsReport {
    pub mode: Mode,
    pub domain_size: usize,
    pub chain_states: usize,
    pub chain_edges: usize,
    pub improving_edges: usize,
    /// Improving edges that leave a state whose Z-set is empty.
    pub bottom_improving_edges: usize,
    pub regressing_edges: usize,
    pub condition_a: ConditionResult,
    pub condition_b: ConditionResult,
}

impl ConditionsReport {
    pub fn passed(&self) -> bool {
        self.condition_a.passed && self.condition_b.passed
    }
}

fn names(planner: &Planner, chain: &InducedChain, start: usize, edges: &[usize]) -> Vec<String> {
    let pm = planner.product();
    let mut out = vec![pm.state_name(chain.product_state(start))];
    out.extend(edges.iter().map(|&e| pm.state_name(chain.product_state(chain.edges[e].to))));
    out
}

/// Checks both defining conditions of a safe improving strategy: (a) an
/// improving edge is reachable (positive mode) or reached on every path
/// (almost-sure mode); (b) no regressing edge is reachable.
pub fn check_strategy_conditions(planner: &Planner, strategy: &Strategy) -> Result<ConditionsReport, VerifyError> {
    let domain = strategy.domain();
    if domain.is_empty() {
        return Err(VerifyError::EmptyDomain);
    }
    let chain = InducedChain::build(planner, strategy)?;
    let pm = planner.product();
    let starts: Vec<usize> = domain.iter().map(|v| chain.index[v]).collect();

    let mut b_fail = 0;
    let mut b_ex = Vec::new();
    for &s in &starts {
        if let Some(p) = chain.path(s, |u| chain.outgoing(u).any(|e| e.regressing)) {
            b_fail += 1;
            if b_ex.len() < MAX_COUNTEREXAMPLES {
                let mut path = names(planner, &chain, s, &p);
                let last = p.last().map_or(s, |&e| chain.edges[e].to);
                let bad = chain.outgoing(last).find(|e| e.regressing).expect("accepted state");
                path.push(pm.state_name(chain.product_state(bad.to)));
                b_ex.push(Counterexample {
                    start: pm.state_name(chain.product_state(s)),
                    path,
                    reason: format!("regressing edge under action {}", pm.mdp().action_name(bad.action)),
                });
            }
        }
    }

    let mut a_fail = 0;
    let mut a_ex = Vec::new();
    match strategy.mode {
        Mode::Spi => {
            for &s in &starts {
                if chain.path(s, |u| chain.outgoing(u).any(|e| e.step.is_improving())).is_none() {
                    a_fail += 1;
                    if a_ex.len() < MAX_COUNTEREXAMPLES {
                        a_ex.push(Counterexample {
                            start: pm.state_name(chain.product_state(s)),
                            path: vec![pm.state_name(chain.product_state(s))],
                            reason: "no improving edge is reachable".into(),
                        });
                    }
                }
            }
        }
        Mode::Sasi => {
            // Improving edges lead into one absorbing sink; leaves are stuck.
            let sink = chain.len();
            let mut rows: Vec<Vec<Choice>> = Vec::with_capacity(sink + 1);
            for i in 0..chain.len() {
                let mut by_action: Vec<Choice> = Vec::new();
                for e in chain.outgoing(i) {
                    let to = if e.step.is_improving() { sink } else { e.to };
                    match by_action.iter_mut().find(|c| c.action == e.action) {
                        Some(c) => c.succ.push((to, e.prob)),
                        None => by_action.push(Choice { action: e.action, succ: vec![(to, e.prob)] }),
                    }
                }
                rows.push(by_action);
            }
            rows.push(vec![Choice { action: ActionId(0), succ: vec![(sink, 1.0)] }]);
            let g = MdpGraph::new(rows);
            let mut target = vec![false; sink + 1];
            target[sink] = true;
            let win = almost_sure_for_all(&g, &target);
            for &s in &starts {
                if !win[s] {
                    a_fail += 1;
                    if a_ex.len() < MAX_COUNTEREXAMPLES {
                        let p = chain.path(s, |u| !win[u] && !chain.expanded[u]);
                        let (path, reason) = match p {
                            Some(p) => (names(planner, &chain, s, &p), "path can leave the strategy domain without improving"),
                            None => (vec![pm.state_name(chain.product_state(s))], "some resolution avoids every improving edge forever"),
                        };
                        a_ex.push(Counterexample { start: pm.state_name(chain.product_state(s)), path, reason: reason.into() });
                    }
                }
            }
        }
    }

    let edges = chain.edges();
    Ok(ConditionsReport {
        mode: strategy.mode,
        domain_size: domain.len(),
        chain_states: chain.len(),
        chain_edges: edges.len(),
        improving_edges: edges.iter().filter(|e| e.step.is_improving()).count(),
        bottom_improving_edges: edges.iter().filter(|e| e.step == Step::ImprovingFromBottom).count(),
        regressing_edges: edges.iter().filter(|e| e.regressing).count(),
        condition_a: ConditionResult::from_failures(a_fail, a_ex),
        condition_b: ConditionResult::from_failures(b_fail, b_ex),
    })
}
