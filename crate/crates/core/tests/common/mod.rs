//! Generators and loaders shared by the integration tests.
#![allow(dead_code)]

use prefplan::automaton::PreferenceDfa;
use prefplan::mdp::{build_gridworld, ActionId, Choice, GridworldConfig, LabeledMdp, MdpGraph};
use prefplan::preference::{OutcomeDecl, PreferenceDeclarations, PreferenceSpec, Statement};
use prefplan::scltl::{Alphabet, Formula, Symbol};
use prefplan::synthesis::{Planner, ProductMdp};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::path::PathBuf;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn alphabet(n: usize) -> Alphabet {
    Alphabet::new((0..n).map(|i| format!("p{i}"))).unwrap()
}

/// A random NNF formula over the atoms of `ab` with nesting depth at most `depth`.
pub fn random_formula<R: Rng>(rng: &mut R, ab: &Alphabet, depth: u32) -> Formula {
    let leaf = |rng: &mut R| {
        let p = ab.names().choose(rng).unwrap().clone();
        match rng.gen_range(0..6) {
            0 => Formula::True,
            1 | 2 => Formula::neg_atom(p),
            _ => Formula::atom(p),
        }
    };
    if depth == 0 || rng.gen_bool(0.25) {
        return leaf(rng);
    }
    let d = depth - 1;
    match rng.gen_range(0..5) {
        0 => Formula::and_raw(random_formula(rng, ab, d), random_formula(rng, ab, d)),
        1 => Formula::or_raw(random_formula(rng, ab, d), random_formula(rng, ab, d)),
        2 => Formula::next(random_formula(rng, ab, d)),
        3 => Formula::until(random_formula(rng, ab, d), random_formula(rng, ab, d)),
        _ => Formula::eventually(random_formula(rng, ab, d)),
    }
}

pub fn random_word<R: Rng>(rng: &mut R, ab: &Alphabet, max_len: usize) -> Vec<Symbol> {
    let n = ab.symbol_count() as u32;
    let len = rng.gen_range(0..=max_len);
    (0..len).map(|_| Symbol(rng.gen_range(0..n))).collect()
}

/// Every word over `ab` of length exactly `len`.
pub fn words_of_length(ab: &Alphabet, len: usize) -> Vec<Vec<Symbol>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                ab.symbols().map(move |s| {
                    let mut w = w.clone();
                    w.push(s);
                    w
                })
            })
            .collect();
    }
    out
}

/// A random MDP graph. About one state in ten is a trap with a single
/// self-loop; the others get 1 to 4 actions with 1 to 3 weighted successors.
pub fn random_graph<R: Rng>(rng: &mut R, n: usize) -> MdpGraph {
    let rows = (0..n)
        .map(|s| {
            if rng.gen_bool(0.1) {
                return vec![Choice { action: ActionId(0), succ: vec![(s, 1.0)] }];
            }
            let k = rng.gen_range(1..=4u32);
            (0..k)
                .map(|a| {
                    let m = rng.gen_range(1..=3);
                    let mut targets: Vec<usize> = (0..m).map(|_| rng.gen_range(0..n)).collect();
                    targets.sort_unstable();
                    targets.dedup();
                    let weights: Vec<f64> = targets.iter().map(|_| rng.gen_range(1..=10) as f64).collect();
                    let total: f64 = weights.iter().sum();
                    let succ = targets.into_iter().zip(weights).map(|(t, w)| (t, w / total)).collect();
                    Choice { action: ActionId(a), succ }
                })
                .collect()
        })
        .collect();
    MdpGraph::new(rows)
}

/// A random MDP whose transitions only move forward by at most `reach`
/// states, or stay. The last state and about one in ten others are traps.
pub fn random_forward_graph<R: Rng>(rng: &mut R, n: usize, reach: usize) -> MdpGraph {
    let rows = (0..n)
        .map(|s| {
            if s + 1 == n || (s > 0 && rng.gen_bool(0.1)) {
                return vec![Choice { action: ActionId(0), succ: vec![(s, 1.0)] }];
            }
            let k = rng.gen_range(1..=4u32);
            (0..k)
                .map(|a| {
                    let m = rng.gen_range(1..=3);
                    let hi = (s + reach).min(n - 1);
                    let mut targets: Vec<usize> = (0..m).map(|_| rng.gen_range(s..=hi)).collect();
                    targets.sort_unstable();
                    targets.dedup();
                    if targets == [s] {
                        targets.push(rng.gen_range(s + 1..=hi));
                    }
                    let weights: Vec<f64> = targets.iter().map(|_| rng.gen_range(1..=10) as f64).collect();
                    let total: f64 = weights.iter().sum();
                    let succ = targets.into_iter().zip(weights).map(|(t, w)| (t, w / total)).collect();
                    Choice { action: ActionId(a), succ }
                })
                .collect()
        })
        .collect();
    MdpGraph::new(rows)
}

/// Minimum probability of never reaching `target`, iterated downward from 1.
/// This is `1 - max reach` computed without cancellation near 1.
pub fn failure_probability(g: &MdpGraph, target: &[bool], sweeps: usize) -> Vec<f64> {
    let mut fail: Vec<f64> = target.iter().map(|&t| if t { 0.0 } else { 1.0 }).collect();
    for _ in 0..sweeps {
        fail = (0..g.len())
            .map(|s| {
                if target[s] {
                    return 0.0;
                }
                g.choices(s)
                    .iter()
                    .map(|c| c.succ.iter().map(|&(t, p)| p * fail[t]).sum::<f64>())
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
    }
    fail
}

pub fn random_target<R: Rng>(rng: &mut R, n: usize) -> Vec<bool> {
    let mut t: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.08)).collect();
    t[rng.gen_range(0..n)] = true;
    t
}

/// A random labeled MDP over atoms `p0..p{atoms-1}`. Actions are named `a0..`.
pub fn random_labeled_mdp<R: Rng>(rng: &mut R, graph: MdpGraph, atoms: usize) -> LabeledMdp {
    let ab = alphabet(atoms);
    let n = graph.len();
    let labels = (0..n)
        .map(|_| {
            let mut s = Symbol::EMPTY;
            for i in 0..atoms {
                if rng.gen_bool(0.15) {
                    s = s.with(i);
                }
            }
            s
        })
        .collect();
    LabeledMdp::from_parts(
        ab,
        (0..n).map(|s| format!("s{s}")).collect(),
        labels,
        (0..4).map(|a| format!("a{a}")).collect(),
        graph,
        vec![(0, 1.0)],
    )
}

/// Random preferences over 2 to 4 reachability-style outcomes. Strict pairs
/// only go from a lower to a higher index, so the closure stays acyclic, and
/// `o0` is always preferred to `o1` so the preference graph has an edge.
pub fn random_preferences<R: Rng>(rng: &mut R, atoms: usize) -> PreferenceDeclarations {
    let names: Vec<String> = (0..atoms).map(|i| format!("p{i}")).collect();
    let k = rng.gen_range(2..=4usize);
    let mut outcomes = Vec::new();
    for i in 0..k {
        let a = &names[i % atoms];
        let b = names.choose(rng).unwrap();
        let formula = match rng.gen_range(0..6) {
            0..=2 => format!("F {a}"),
            3 => format!("!{b} U {a}"),
            4 => format!("F ({a} & X F {b})"),
            _ => format!("F {a} & F {b}"),
        };
        outcomes.push(OutcomeDecl { name: format!("o{i}"), formula });
    }
    let mut preferences = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            if (i, j) == (0, 1) || rng.gen_bool(0.5) {
                preferences.push(Statement::Strict { better: format!("o{i}"), worse: format!("o{j}") });
            }
        }
    }
    PreferenceDeclarations { atoms: names, outcomes, preferences }
}

/// A small random planning instance on a forward-moving MDP, where
/// guarantees change along the way and strategies are rarely vacuous.
pub fn random_planner(seed: u64) -> Planner {
    let mut r = rng(seed);
    let n = r.gen_range(8..=30);
    let graph = random_forward_graph(&mut r, n, 3);
    let mdp = random_labeled_mdp(&mut r, graph, 3);
    let decl = random_preferences(&mut r, 3);
    let spec = PreferenceSpec::build(&decl).expect("generated preferences are consistent");
    let pdfa = PreferenceDfa::build(&spec).unwrap();
    Planner::new(ProductMdp::build(&mdp, &pdfa).unwrap())
}

pub fn bundle_dir(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../bundles").join(name)
}

pub fn load_config(bundle: &str) -> GridworldConfig {
    let text = std::fs::read_to_string(bundle_dir(bundle).join("gridworld.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

pub fn load_spec(bundle: &str) -> PreferenceSpec {
    let text = std::fs::read_to_string(bundle_dir(bundle).join("preferences.json")).unwrap();
    PreferenceSpec::build(&serde_json::from_str(&text).unwrap()).unwrap()
}

/// Planner on a shipped bundle with the given battery capacity.
pub fn bundle_planner(bundle: &str, battery: u32) -> Planner {
    let mut cfg = load_config(bundle);
    cfg.battery_capacity = battery;
    let mdp = build_gridworld(&cfg).unwrap();
    let pdfa = PreferenceDfa::build(&load_spec(bundle)).unwrap();
    Planner::new(ProductMdp::build(&mdp, &pdfa).unwrap())
}

pub fn action_names(planner: &Planner, acts: Option<&[ActionId]>) -> Option<Vec<String>> {
    let mdp = planner.product().mdp();
    acts.map(|a| a.iter().map(|&x| mdp.action_name(x).to_string()).collect())
}
