use super::product::ProductMdp;
use super::solver::{aswin, WinningRegion};
use crate::automaton::NodeId;
use crate::mdp::{ActionId, Choice, MdpGraph};

/// Almost-sure winning regions of every node block, and per product state the
/// set `Z_v` of nodes it can reach with probability one.
#[derive(Clone, Debug)]
pub struct ZSets {
    regions: Vec<WinningRegion>,
    z: Vec<Vec<NodeId>>,
    mp: Vec<Vec<NodeId>>,
}

impl ZSets {
    pub fn compute(pm: &ProductMdp) -> Self {
        let nodes: Vec<NodeId> = (0..pm.node_count()).map(NodeId).collect();
        let solve = |&n: &NodeId| aswin(pm.graph(), &pm.node_target(n));
        #[cfg(feature = "parallel")]
        let regions: Vec<WinningRegion> = {
            use rayon::prelude::*;
            nodes.par_iter().map(solve).collect()
        };
        #[cfg(not(feature = "parallel"))]
        let regions: Vec<WinningRegion> = nodes.iter().map(solve).collect();

        let z: Vec<Vec<NodeId>> =
            (0..pm.len()).map(|v| nodes.iter().copied().filter(|n| regions[n.0].contains(v)).collect()).collect();
        let pdfa = pm.pdfa();
        let mp = z
            .iter()
            .map(|zs| zs.iter().copied().filter(|&w| !zs.iter().any(|&w2| pdfa.has_edge(w, w2))).collect())
            .collect();
        ZSets { regions, z, mp }
    }

    pub fn region(&self, n: NodeId) -> &WinningRegion {
        &self.regions[n.0]
    }

    pub fn z(&self, v: usize) -> &[NodeId] {
        &self.z[v]
    }

    /// Most preferred members of `Z_v`; empty stands for the virtual bottom node.
    pub fn mp(&self, v: usize) -> &[NodeId] {
        &self.mp[v]
    }
}

/// How `v2` relates to `v1` under the improvement relation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Step {
    /// `v2` improves on `v1` through a real preference-graph edge.
    Improving,
    /// `v2` improves on `v1` only because `Z_{v1}` is empty.
    ImprovingFromBottom,
    Neutral,
}

impl Step {
    pub fn is_improving(self) -> bool {
        !matches!(self, Step::Neutral)
    }
}

pub fn classify_step(pm: &ProductMdp, z: &ZSets, v1: usize, v2: usize) -> Step {
    let (m1, m2) = (z.mp(v1), z.mp(v2));
    if m2.is_empty() {
        return Step::Neutral;
    }
    if m1.is_empty() {
        return Step::ImprovingFromBottom;
    }
    let pdfa = pm.pdfa();
    if m1.iter().any(|&a| m2.iter().any(|&b| pdfa.has_edge(a, b))) {
        Step::Improving
    } else {
        Step::Neutral
    }
}

/// Whether `v2` is an improvement over `v1`.
pub fn is_improvement(pm: &ProductMdp, z: &ZSets, v1: usize, v2: usize) -> bool {
    classify_step(pm, z, v1, v2).is_improving()
}

/// The doubled MDP in which reaching a top copy marks an improvement. State
/// `2v` is `(v, bottom)` and `2v + 1` is `(v, top)`.
#[derive(Clone, Debug)]
pub struct ImprovementMdp {
    graph: MdpGraph,
    enabled: Vec<Vec<ActionId>>,
    dead_action: ActionId,
}

impl ImprovementMdp {
    pub fn build(pm: &ProductMdp, z: &ZSets) -> Self {
        let n = pm.len();
        let dead_action = ActionId(pm.mdp().actions().len() as u32);
        let mut enabled = Vec::with_capacity(n);
        let mut rows = Vec::with_capacity(2 * n);
        for v in 0..n {
            let ok: Vec<&Choice> = pm
                .graph()
                .choices(v)
                .iter()
                .filter(|c| c.succ.iter().all(|&(w, p)| p == 0.0 || !is_improvement(pm, z, w, v)))
                .collect();
            enabled.push(ok.iter().map(|c| c.action).collect());
            let (bot, top) = (2 * v, 2 * v + 1);
            if ok.is_empty() {
                rows.push(vec![Choice { action: dead_action, succ: vec![(bot, 1.0)] }]);
                rows.push(vec![Choice { action: dead_action, succ: vec![(top, 1.0)] }]);
                continue;
            }
            let from_bot = ok
                .iter()
                .map(|c| Choice {
                    action: c.action,
                    succ: c
                        .succ
                        .iter()
                        .map(|&(w, p)| (if is_improvement(pm, z, v, w) { 2 * w + 1 } else { 2 * w }, p))
                        .collect(),
                })
                .collect();
            let from_top =
                ok.iter().map(|c| Choice { action: c.action, succ: c.succ.iter().map(|&(w, p)| (2 * w, p)).collect() }).collect();
            rows.push(from_bot);
            rows.push(from_top);
        }
        ImprovementMdp { graph: MdpGraph::new(rows), enabled, dead_action }
    }

    pub fn graph(&self) -> &MdpGraph {
        &self.graph
    }

    pub fn len(&self) -> usize {
        self.graph.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graph.is_empty()
    }

    /// Regression-free actions of product state `v`.
    pub fn enabled(&self, v: usize) -> &[ActionId] {
        &self.enabled[v]
    }

    pub fn is_dead(&self, v: usize) -> bool {
        self.enabled[v].is_empty()
    }

    pub fn dead_action(&self) -> ActionId {
        self.dead_action
    }

    pub fn top_states(&self) -> Vec<bool> {
        (0..self.len()).map(|i| i % 2 == 1).collect()
    }
}
