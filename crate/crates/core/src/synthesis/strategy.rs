use super::improvement::{classify_step, ImprovementMdp, Step, ZSets};
use super::product::ProductMdp;
use super::solver::{aswin, pwin, WinningRegion};
use crate::automaton::NodeId;
use crate::mdp::ActionId;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Spi,
    Sasi,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Spi => "spi",
            Mode::Sasi => "sasi",
        }
    }
}

/// A set-valued memoryless strategy over product states; `None` is undefined.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Strategy {
    pub mode: Mode,
    pub actions: Vec<Option<Vec<ActionId>>>,
}

impl Strategy {
    pub fn at(&self, v: usize) -> Option<&[ActionId]> {
        self.actions[v].as_deref()
    }

    pub fn is_defined(&self, v: usize) -> bool {
        self.actions[v].is_some()
    }

    pub fn domain(&self) -> Vec<usize> {
        (0..self.actions.len()).filter(|&v| self.is_defined(v)).collect()
    }

    pub fn to_document(&self, pm: &ProductMdp) -> StrategyDocument {
        let mut entries = Vec::new();
        let mut undefined_states = Vec::new();
        for (v, a) in self.actions.iter().enumerate() {
            match a {
                Some(acts) => entries.push(StrategyEntry {
                    state: pm.state_name(v),
                    actions: acts.iter().map(|&a| pm.mdp().action_name(a).to_string()).collect(),
                }),
                None => undefined_states.push(pm.state_name(v)),
            }
        }
        StrategyDocument { mode: self.mode, entries, undefined_states }
    }

    /// Loads a strategy document against `pm`, resolving state and action names.
    pub fn from_document(doc: &StrategyDocument, pm: &ProductMdp) -> Result<Self, String> {
        let mut actions = vec![None; pm.len()];
        for e in &doc.entries {
            let v = pm.find_by_name(&e.state).ok_or_else(|| format!("unknown product state {:?}", e.state))?;
            let acts = e
                .actions
                .iter()
                .map(|a| pm.mdp().find_action(a).ok_or_else(|| format!("unknown action {a:?}")))
                .collect::<Result<Vec<_>, _>>()?;
            actions[v] = Some(acts);
        }
        Ok(Strategy { mode: doc.mode, actions })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrategyEntry {
    pub state: String,
    pub actions: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrategyDocument {
    pub mode: Mode,
    pub entries: Vec<StrategyEntry>,
    pub undefined_states: Vec<String>,
}

/// Every synthesis artifact for one product: Z-sets, the improvement MDP and
/// both improving strategies.
#[derive(Clone, Debug)]
pub struct Planner {
    product: ProductMdp,
    z: ZSets,
    improvement: ImprovementMdp,
    spi_region: WinningRegion,
    sasi_region: WinningRegion,
    spi: Strategy,
    sasi: Strategy,
}

impl Planner {
    pub fn new(product: ProductMdp) -> Self {
        let z = ZSets::compute(&product);
        let improvement = ImprovementMdp::build(&product, &z);
        let top = improvement.top_states();
        let spi_region = pwin(improvement.graph(), &top);
        let sasi_region = aswin(improvement.graph(), &top);
        let lift = |r: &WinningRegion, mode| Strategy {
            mode,
            actions: (0..product.len()).map(|v| r.strategy[2 * v].clone()).collect(),
        };
        let spi = lift(&spi_region, Mode::Spi);
        let sasi = lift(&sasi_region, Mode::Sasi);
        Planner { product, z, improvement, spi_region, sasi_region, spi, sasi }
    }

    pub fn product(&self) -> &ProductMdp {
        &self.product
    }

    pub fn z_sets(&self) -> &ZSets {
        &self.z
    }

    pub fn improvement(&self) -> &ImprovementMdp {
        &self.improvement
    }

    pub fn strategy(&self, mode: Mode) -> &Strategy {
        match mode {
            Mode::Spi => &self.spi,
            Mode::Sasi => &self.sasi,
        }
    }

    /// Winning region in the improvement MDP underlying `mode`.
    pub fn improvement_region(&self, mode: Mode) -> &WinningRegion {
        match mode {
            Mode::Spi => &self.spi_region,
            Mode::Sasi => &self.sasi_region,
        }
    }

    pub fn step_kind(&self, v1: usize, v2: usize) -> Step {
        classify_step(&self.product, &self.z, v1, v2)
    }

    pub fn is_improvement(&self, v1: usize, v2: usize) -> bool {
        self.step_kind(v1, v2).is_improving()
    }

    pub fn regions_document(&self) -> RegionsDocument {
        let pm = &self.product;
        let pdfa = pm.pdfa();
        let names = |r: &[bool]| -> Vec<String> {
            r.iter().enumerate().filter(|(_, &b)| b).map(|(v, _)| pm.state_name(v)).collect()
        };
        let nodes = pm
            .present_nodes()
            .into_iter()
            .map(|n| NodeRegion {
                node: n.0,
                tags: pdfa.format_tags(&pdfa.node(n).tags),
                almost_sure: names(&self.z.region(n).region),
            })
            .collect();
        let domain = |s: &Strategy| s.domain().into_iter().map(|v| pm.state_name(v)).collect();
        let bottom = (0..pm.len())
            .filter(|&v| {
                pm.graph()
                    .choices(v)
                    .iter()
                    .any(|c| c.succ.iter().any(|&(w, _)| self.step_kind(v, w) == Step::ImprovingFromBottom))
            })
            .map(|v| pm.state_name(v))
            .collect();
        RegionsDocument {
            nodes,
            spi_domain: domain(&self.spi),
            sasi_domain: domain(&self.sasi),
            bottom_improvement_sources: bottom,
        }
    }

    pub fn improvement_dot(&self) -> String {
        let pm = &self.product;
        let im = &self.improvement;
        let mut out = String::from("digraph improvement_mdp {\n");
        for i in 0..im.len() {
            let v = i / 2;
            let top = i % 2 == 1;
            let style = if top { ", style=filled, fillcolor=gold" } else { "" };
            let flag = if top { "⊤" } else { "⊥" };
            let _ = writeln!(out, "  n{i} [label=\"{} {flag}\"{style}];", pm.state_name(v).replace('"', "\\\""));
        }
        for i in 0..im.len() {
            for c in im.graph().choices(i) {
                let name = if c.action == im.dead_action() { "dead" } else { pm.mdp().action_name(c.action) };
                for &(j, p) in &c.succ {
                    let _ = writeln!(out, "  n{i} -> n{j} [label=\"{} {p}\"];", name.replace('"', "\\\""));
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeRegion {
    pub node: usize,
    pub tags: String,
    pub almost_sure: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionsDocument {
    pub nodes: Vec<NodeRegion>,
    pub spi_domain: Vec<String>,
    pub sasi_domain: Vec<String>,
    /// States with an outgoing improvement that exists only because their own
    /// Z-set is empty.
    pub bottom_improvement_sources: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TieBreak {
    Lowest,
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "phase", content = "node")]
pub enum Phase {
    Improving,
    Satisficing(NodeId),
    Unsatisfiable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PolicyStep {
    pub action: ActionId,
    pub phase: Phase,
}

/// Runtime policy chaining improvements: it follows the improving strategy
/// whenever defined, and otherwise the almost-sure strategy of a most
/// preferred reachable node.
#[derive(Clone, Copy, Debug)]
pub struct CompositePolicy<'a> {
    planner: &'a Planner,
    mode: Mode,
    tie_break: TieBreak,
}

impl<'a> CompositePolicy<'a> {
    pub fn new(planner: &'a Planner, mode: Mode, tie_break: TieBreak) -> Self {
        CompositePolicy { planner, mode, tie_break }
    }

    pub fn planner(&self) -> &'a Planner {
        self.planner
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    fn pick<R: Rng + ?Sized>(&self, options: &[ActionId], rng: &mut R) -> ActionId {
        match self.tie_break {
            TieBreak::Lowest => options[0],
            TieBreak::Random => options[rng.gen_range(0..options.len())],
        }
    }

    pub fn step<R: Rng + ?Sized>(&self, v: usize, rng: &mut R) -> PolicyStep {
        let p = self.planner;
        if let Some(acts) = p.strategy(self.mode).at(v) {
            return PolicyStep { action: self.pick(acts, rng), phase: Phase::Improving };
        }
        let enabled = p.improvement().enabled(v);
        let every: Vec<ActionId> = p.product().graph().choices(v).iter().map(|c| c.action).collect();
        let fallback = if enabled.is_empty() { &every[..] } else { enabled };
        let Some(&node) = p.z_sets().mp(v).first() else {
            return PolicyStep { action: self.pick(fallback, rng), phase: Phase::Unsatisfiable };
        };
        let action = match p.z_sets().region(node).actions(v) {
            Some(acts) => {
                let safe: Vec<ActionId> = acts.iter().copied().filter(|a| enabled.contains(a)).collect();
                if safe.is_empty() {
                    self.pick(acts, rng)
                } else {
                    self.pick(&safe, rng)
                }
            }
            None => self.pick(fallback, rng),
        };
        PolicyStep { action, phase: Phase::Satisficing(node) }
    }
}
