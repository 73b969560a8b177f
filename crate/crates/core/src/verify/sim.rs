use super::VerifyError;
use crate::automaton::NodeId;
use crate::mdp::ActionId;
use crate::synthesis::{CompositePolicy, Phase, Planner, PolicyStep, Step};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Something that picks an action at a product state.
pub trait Policy: Sync {
    fn choose(&self, v: usize, rng: &mut ChaCha8Rng) -> PolicyStep;
}

impl Policy for CompositePolicy<'_> {
    fn choose(&self, v: usize, rng: &mut ChaCha8Rng) -> PolicyStep {
        self.step(v, rng)
    }
}

/// One fixed action per product state.
#[derive(Clone, Debug)]
pub struct FixedPolicy(pub Vec<ActionId>);

impl Policy for FixedPolicy {
    fn choose(&self, v: usize, _: &mut ChaCha8Rng) -> PolicyStep {
        PolicyStep { action: self.0[v], phase: Phase::Improving }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SimConfig {
    pub episodes: u64,
    pub horizon: u64,
    pub seed: u64,
}

/// Ten steps per product state.
pub fn default_horizon(planner: &Planner) -> u64 {
    10 * planner.product().len() as u64
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub episode: u64,
    pub steps: u64,
    pub improvements: u32,
    pub bottom_improvements: u32,
    pub regressions: u32,
    pub final_node: Option<usize>,
    pub truncated: bool,
    pub unsatisfiable: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeStats {
    pub episodes: u64,
    pub seed: u64,
    pub horizon: u64,
    /// Number of episodes per improvement count.
    pub improvements_per_episode: BTreeMap<u32, u64>,
    pub min_improvements: u32,
    /// Frequency of the preference node holding the last state, or "none".
    pub final_node_distribution: BTreeMap<String, f64>,
    pub regressions_observed: u64,
    pub bottom_improvements: u64,
    pub truncated_episodes: u64,
    pub unsatisfiable_episodes: u64,
    #[serde(skip)]
    pub records: Vec<EpisodeRecord>,
}

impl EpisodeStats {
    fn aggregate(planner: &Planner, cfg: SimConfig, records: Vec<EpisodeRecord>) -> Self {
        let mut hist = BTreeMap::new();
        let mut finals: BTreeMap<String, u64> = BTreeMap::new();
        for r in &records {
            *hist.entry(r.improvements).or_insert(0) += 1;
            *finals.entry(node_key(planner, r.final_node)).or_insert(0) += 1;
        }
        let n = cfg.episodes as f64;
        EpisodeStats {
            episodes: cfg.episodes,
            seed: cfg.seed,
            horizon: cfg.horizon,
            improvements_per_episode: hist,
            min_improvements: records.iter().map(|r| r.improvements).min().unwrap_or(0),
            final_node_distribution: finals.into_iter().map(|(k, c)| (k, c as f64 / n)).collect(),
            regressions_observed: records.iter().map(|r| r.regressions as u64).sum(),
            bottom_improvements: records.iter().map(|r| r.bottom_improvements as u64).sum(),
            truncated_episodes: records.iter().filter(|r| r.truncated).count() as u64,
            unsatisfiable_episodes: records.iter().filter(|r| r.unsatisfiable).count() as u64,
            records,
        }
    }

    /// Share of episodes with at least `k` improvements.
    pub fn fraction_with_at_least(&self, k: u32) -> f64 {
        let hits: u64 = self.improvements_per_episode.range(k..).map(|(_, c)| c).sum();
        hits as f64 / self.episodes as f64
    }

    /// One row per episode: episode, seed, steps, improvements, regressions,
    /// final node and the truncation flag.
    pub fn to_csv(&self) -> String {
        #[derive(Serialize)]
        struct Row {
            episode: u64,
            seed: u64,
            steps: u64,
            improvements: u32,
            regressions: u32,
            final_node: Option<usize>,
            truncated: bool,
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.records {
            w.serialize(Row {
                episode: r.episode,
                seed: self.seed,
                steps: r.steps,
                improvements: r.improvements,
                regressions: r.regressions,
                final_node: r.final_node,
                truncated: r.truncated,
            })
            .expect("in-memory csv write");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv flush")).expect("csv output is utf-8")
    }
}

fn node_key(planner: &Planner, node: Option<usize>) -> String {
    match node {
        Some(n) => {
            let pdfa = planner.product().pdfa();
            format!("{n}:{}", pdfa.format_tags(&pdfa.node(NodeId(n)).tags))
        }
        None => "none".into(),
    }
}

fn sample<R: Rng>(dist: &[(usize, f64)], rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for &(s, p) in dist {
        acc += p;
        if u < acc {
            return s;
        }
    }
    dist.iter().rev().find(|(_, p)| *p > 0.0).map_or(dist[0].0, |&(s, _)| s)
}

fn run_episode<P: Policy>(planner: &Planner, policy: &P, cfg: SimConfig, episode: u64) -> EpisodeRecord {
    let pm = planner.product();
    let g = pm.graph();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(episode);
    let mut v = sample(pm.initial(), &mut rng);
    let mut rec = EpisodeRecord {
        episode,
        steps: 0,
        improvements: 0,
        bottom_improvements: 0,
        regressions: 0,
        final_node: None,
        truncated: true,
        unsatisfiable: false,
    };
    while rec.steps < cfg.horizon {
        if g.is_absorbing(v) {
            rec.truncated = false;
            break;
        }
        let step = policy.choose(v, &mut rng);
        rec.unsatisfiable |= step.phase == Phase::Unsatisfiable;
        let choice = g.choice(v, step.action).expect("policy picks an available action");
        let w = sample(&choice.succ, &mut rng);
        match planner.step_kind(v, w) {
            Step::Improving => rec.improvements += 1,
            Step::ImprovingFromBottom => {
                rec.improvements += 1;
                rec.bottom_improvements += 1;
            }
            Step::Neutral => {}
        }
        if planner.is_improvement(w, v) {
            rec.regressions += 1;
        }
        v = w;
        rec.steps += 1;
    }
    if rec.truncated && g.is_absorbing(v) {
        rec.truncated = false;
    }
    rec.final_node = pm.node_of(v).map(|n| n.0);
    rec
}

/// Seeded rollouts. Episode `i` draws from the ChaCha8 stream `i` of `seed`,
/// so results do not depend on scheduling.
pub fn monte_carlo<P: Policy>(planner: &Planner, policy: &P, cfg: SimConfig) -> Result<EpisodeStats, VerifyError> {
    if cfg.episodes == 0 || cfg.horizon == 0 {
        return Err(VerifyError::BadSimulation);
    }
    #[cfg(feature = "parallel")]
    let records: Vec<EpisodeRecord> = {
        use rayon::prelude::*;
        (0..cfg.episodes).into_par_iter().map(|i| run_episode(planner, policy, cfg, i)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let records: Vec<EpisodeRecord> = (0..cfg.episodes).map(|i| run_episode(planner, policy, cfg, i)).collect();
    Ok(EpisodeStats::aggregate(planner, cfg, records))
}

/// Exact distribution of the final node after `horizon` steps of a
/// deterministic policy, with the same stop at absorbing states.
pub fn exact_final_distribution(
    planner: &Planner,
    action: impl Fn(usize) -> ActionId,
    horizon: u64,
) -> BTreeMap<Option<usize>, f64> {
    let pm = planner.product();
    let g = pm.graph();
    let mut dist = vec![0.0; pm.len()];
    for &(v, p) in pm.initial() {
        dist[v] += p;
    }
    for _ in 0..horizon {
        let mut next = vec![0.0; pm.len()];
        for v in 0..pm.len() {
            if dist[v] == 0.0 {
                continue;
            }
            if g.is_absorbing(v) {
                next[v] += dist[v];
                continue;
            }
            let choice = g.choice(v, action(v)).expect("policy picks an available action");
            for &(w, p) in &choice.succ {
                next[w] += dist[v] * p;
            }
        }
        dist = next;
    }
    let mut out = BTreeMap::new();
    for (v, &p) in dist.iter().enumerate() {
        if p > 0.0 {
            *out.entry(pm.node_of(v).map(|n| n.0)).or_insert(0.0) += p;
        }
    }
    out
}
