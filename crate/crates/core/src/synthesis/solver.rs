//! Qualitative reachability on the positive-probability graph of an MDP.

use crate::mdp::{ActionId, MdpGraph};
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WinKind {
    AlmostSure,
    Positive,
}

/// A winning region with its permissive memoryless strategy. The strategy is
/// defined exactly on `region \ target`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WinningRegion {
    pub kind: WinKind,
    pub target: Vec<bool>,
    pub region: Vec<bool>,
    pub distance: Vec<Option<u32>>,
    pub strategy: Vec<Option<Vec<ActionId>>>,
}

impl WinningRegion {
    pub fn contains(&self, s: usize) -> bool {
        self.region[s]
    }

    pub fn size(&self) -> usize {
        self.region.iter().filter(|&&b| b).count()
    }

    pub fn actions(&self, s: usize) -> Option<&[ActionId]> {
        self.strategy[s].as_deref()
    }
}

/// Backward breadth-first distances to `target`, using only the choices that
/// `allowed(state, choice index)` admits and only states in `alive`.
fn distances(
    g: &MdpGraph,
    pre: &[Vec<(usize, usize)>],
    target: &[bool],
    alive: &[bool],
    allowed: &dyn Fn(usize, usize) -> bool,
) -> Vec<Option<u32>> {
    let mut dist = vec![None; g.len()];
    let mut queue = VecDeque::new();
    for s in 0..g.len() {
        if target[s] && alive[s] {
            dist[s] = Some(0);
            queue.push_back(s);
        }
    }
    while let Some(u) = queue.pop_front() {
        let d = dist[u].expect("queued states have a distance");
        for &(s, ci) in &pre[u] {
            if dist[s].is_none() && alive[s] && allowed(s, ci) {
                dist[s] = Some(d + 1);
                queue.push_back(s);
            }
        }
    }
    dist
}

fn progress_actions(
    g: &MdpGraph,
    s: usize,
    dist: &[Option<u32>],
    allowed: &dyn Fn(usize, usize) -> bool,
) -> Vec<ActionId> {
    let here = dist[s].expect("region state");
    g.choices(s)
        .iter()
        .enumerate()
        .filter(|&(ci, c)| {
            allowed(s, ci) && c.succ.iter().any(|&(t, p)| p > 0.0 && dist[t].is_some_and(|d| d < here))
        })
        .map(|(_, c)| c.action)
        .collect()
}

/// States from which `target` is reached with positive probability.
pub fn pwin(g: &MdpGraph, target: &[bool]) -> WinningRegion {
    let pre = g.predecessors();
    let alive = vec![true; g.len()];
    let all = |_: usize, _: usize| true;
    let dist = distances(g, &pre, target, &alive, &all);
    let region: Vec<bool> = dist.iter().map(Option::is_some).collect();
    let strategy = (0..g.len())
        .map(|s| (region[s] && !target[s]).then(|| progress_actions(g, s, &dist, &all)))
        .collect();
    WinningRegion { kind: WinKind::Positive, target: target.to_vec(), region, distance: dist, strategy }
}

/// States from which `target` is reached with probability one: the largest
/// set that can be kept invariant while `target` stays reachable inside it.
pub fn aswin(g: &MdpGraph, target: &[bool]) -> WinningRegion {
    let pre = g.predecessors();
    let mut alive = vec![true; g.len()];
    loop {
        let snapshot = alive.clone();
        let allowed = |s: usize, ci: usize| g.choices(s)[ci].succ.iter().all(|&(t, p)| p == 0.0 || snapshot[t]);
        let dist = distances(g, &pre, target, &snapshot, &allowed);
        let mut changed = false;
        for s in 0..g.len() {
            if alive[s] && dist[s].is_none() {
                alive[s] = false;
                changed = true;
            }
        }
        if !changed {
            let strategy = (0..g.len())
                .map(|s| (alive[s] && !target[s]).then(|| progress_actions(g, s, &dist, &allowed)))
                .collect();
            return WinningRegion { kind: WinKind::AlmostSure, target: target.to_vec(), region: alive, distance: dist, strategy };
        }
    }
}

/// States from which `target` is reached with probability one under every
/// resolution of the choices, counting a state without choices as stuck.
pub fn almost_sure_for_all(g: &MdpGraph, target: &[bool]) -> Vec<bool> {
    let n = g.len();
    // Largest set outside the target that some resolution never leaves.
    let mut avoid: Vec<bool> = (0..n).map(|s| !target[s]).collect();
    loop {
        let mut changed = false;
        for s in 0..n {
            if avoid[s] {
                let choices = g.choices(s);
                let stays = choices.is_empty()
                    || choices.iter().any(|c| c.succ.iter().all(|&(t, p)| p == 0.0 || avoid[t]));
                if !stays {
                    avoid[s] = false;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    // Anything that can reach that set without passing the target fails.
    let pre = g.predecessors();
    let mut bad = avoid.clone();
    let mut queue: VecDeque<usize> = (0..n).filter(|&s| bad[s]).collect();
    while let Some(u) = queue.pop_front() {
        for &(s, _) in &pre[u] {
            if !bad[s] && !target[s] {
                bad[s] = true;
                queue.push_back(s);
            }
        }
    }
    bad.iter().map(|b| !b).collect()
}
