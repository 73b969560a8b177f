//! Browser bindings. Every export takes and returns JSON text so the page
//! needs no generated types.

use prefplan::automaton::PreferenceDfa;
use prefplan::mdp::{build_gridworld, GridworldConfig};
use prefplan::preference::{PreferenceDeclarations, PreferenceSpec};
use prefplan::scltl::{parse, to_dfa_with_cap, Alphabet};
use prefplan::synthesis::{CompositePolicy, Mode, Phase, Planner, ProductMdp, TieBreak};
use prefplan::verify::{check_strategy_conditions, monte_carlo, SimConfig, VerifyError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Keeps a browser tab responsive on careless input.
const STATE_CAP: usize = 50_000;
const MAX_EPISODES: u64 = 20_000;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn to_text(v: &impl Serialize) -> Result<String, String> {
    serde_json::to_string(v).map_err(err)
}

/// The shipped example files, as `{gridworld, preferences}` JSON text.
pub fn bundle_text(name: &str) -> Result<String, String> {
    let (grid, prefs) = match name {
        "po1" => (include_str!("../../../bundles/po1/gridworld.json"), include_str!("../../../bundles/po1/preferences.json")),
        "po2" => (include_str!("../../../bundles/po2/gridworld.json"), include_str!("../../../bundles/po2/preferences.json")),
        other => return Err(format!("unknown bundle {other:?}")),
    };
    to_text(&json!({ "gridworld": grid, "preferences": prefs }))
}

/// Compiles one formula over comma-separated atoms.
pub fn compile_text(formula: &str, atoms: &str) -> Result<String, String> {
    let names: Vec<&str> = atoms.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    let ab = Alphabet::new(names).map_err(err)?;
    let f = parse(formula, &ab).map_err(err)?;
    let dfa = to_dfa_with_cap(&f, &ab, STATE_CAP).map_err(err)?;
    to_text(&json!({
        "formula": f.to_string(),
        "states": dfa.len(),
        "accepting": dfa.accepting_states().count(),
        "document": dfa.to_document(),
        "dot": dfa.to_dot(),
    }))
}

fn load_spec(prefs: &str) -> Result<PreferenceSpec, String> {
    let decl: PreferenceDeclarations = serde_json::from_str(prefs).map_err(|e| format!("preference file: {e}"))?;
    PreferenceSpec::build(&decl).map_err(err)
}

/// Preference DFA summary with its graph.
pub fn preference_graph_text(prefs: &str) -> Result<String, String> {
    let spec = load_spec(prefs)?;
    let pdfa = PreferenceDfa::build_with_cap(&spec, STATE_CAP).map_err(err)?;
    let nodes: Vec<Value> = pdfa
        .nodes()
        .iter()
        .enumerate()
        .map(|(i, n)| json!({ "id": i, "tags": pdfa.format_tags(&n.tags), "states": n.states.len() }))
        .collect();
    let edges: Vec<Value> = pdfa.edges().iter().map(|&(w, b)| json!({ "worse": w.0, "better": b.0 })).collect();
    to_text(&json!({
        "states": pdfa.len(),
        "final": pdfa.final_count(),
        "nodes": nodes,
        "edges": edges,
        "dot": pdfa.to_dot(),
    }))
}

#[derive(Serialize)]
struct Cell {
    col: u32,
    row: u32,
    obstacle: bool,
    regions: Vec<String>,
    drift: Vec<String>,
}

#[derive(Serialize)]
struct Visit {
    state: String,
    col: u32,
    row: u32,
    action: Option<String>,
    phase: Option<String>,
}

fn cell_of(name: &str) -> (u32, u32) {
    let inner = &name[1..name.find(')').unwrap_or(name.len())];
    let mut it = inner.split(',').map(|x| x.parse().unwrap_or(0));
    (it.next().unwrap_or(0), it.next().unwrap_or(0))
}

fn phase_name(p: &Planner, phase: Phase) -> String {
    match phase {
        Phase::Improving => "improving".into(),
        Phase::Satisficing(n) => format!("satisficing {}", p.product().pdfa().format_tags(&p.product().pdfa().node(n).tags)),
        Phase::Unsatisfiable => "unsatisfiable".into(),
    }
}

/// Synthesizes, verifies and simulates on a gridworld, and traces one episode.
pub fn plan_text(grid: &str, prefs: &str, battery: u32, mode: &str, episodes: u64, seed: u64) -> Result<String, String> {
    let mut cfg: GridworldConfig = serde_json::from_str(grid).map_err(|e| format!("gridworld config: {e}"))?;
    if battery > 0 {
        cfg.battery_capacity = battery;
    }
    let mode = match mode {
        "spi" => Mode::Spi,
        "sasi" => Mode::Sasi,
        other => return Err(format!("mode must be spi or sasi, not {other:?}")),
    };
    let mdp = build_gridworld(&cfg).map_err(err)?;
    let pdfa = PreferenceDfa::build_with_cap(&load_spec(prefs)?, STATE_CAP).map_err(err)?;
    let pm = ProductMdp::build_with_cap(&mdp, &pdfa, STATE_CAP).map_err(err)?;
    let planner = Planner::new(pm);
    let pm = planner.product();
    let v0 = pm.initial()[0].0;

    let strategy = planner.strategy(mode);
    let names = |acts: Option<&[prefplan::mdp::ActionId]>| {
        acts.map(|a| a.iter().map(|&x| pm.mdp().action_name(x).to_string()).collect::<Vec<_>>())
    };
    let conditions = match check_strategy_conditions(&planner, strategy) {
        Ok(r) => json!({ "condition_a": r.condition_a.passed, "condition_b": r.condition_b.passed, "domain": r.domain_size }),
        Err(VerifyError::EmptyDomain) => json!({ "skipped": "undefined everywhere" }),
        Err(e) => return Err(err(e)),
    };

    let policy = CompositePolicy::new(&planner, mode, TieBreak::Lowest);
    let horizon = 10 * pm.len() as u64;
    let episodes = episodes.clamp(1, MAX_EPISODES);
    let stats = monte_carlo(&planner, &policy, SimConfig { episodes, horizon, seed }).map_err(err)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = v0;
    let mut trace = Vec::new();
    for _ in 0..horizon.min(200) {
        let name = pm.state_name(v);
        let (col, row) = cell_of(&name);
        if pm.graph().is_absorbing(v) {
            trace.push(Visit { state: name, col, row, action: None, phase: None });
            break;
        }
        let step = policy.step(v, &mut rng);
        trace.push(Visit {
            state: name,
            col,
            row,
            action: Some(pm.mdp().action_name(step.action).into()),
            phase: Some(phase_name(&planner, step.phase)),
        });
        let succ = &pm.graph().choice(v, step.action).expect("policy picks an offered action").succ;
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        v = succ.last().expect("nonempty distribution").0;
        for &(w, p) in succ {
            acc += p;
            if u < acc {
                v = w;
                break;
            }
        }
    }

    let cells: Vec<Cell> = (0..cfg.height)
        .flat_map(|row| (0..cfg.width).map(move |col| (col, row)))
        .map(|(col, row)| {
            let here = prefplan::mdp::Cell(col, row);
            Cell {
                col,
                row,
                obstacle: cfg.obstacles.contains(&here),
                regions: cfg.regions.iter().filter(|(_, cs)| cs.contains(&here)).map(|(r, _)| r.clone()).collect(),
                drift: cfg
                    .drift
                    .iter()
                    .filter(|d| d.cell == here)
                    .flat_map(|d| d.directions.iter().map(|x| x.name().to_string()))
                    .collect(),
            }
        })
        .collect();

    to_text(&json!({
        "width": cfg.width,
        "height": cfg.height,
        "cells": cells,
        "product_states": pm.len(),
        "start": pm.state_name(v0),
        "spi_at_start": names(planner.strategy(Mode::Spi).at(v0)),
        "sasi_at_start": names(planner.strategy(Mode::Sasi).at(v0)),
        "conditions": conditions,
        "stats": {
            "episodes": stats.episodes,
            "min_improvements": stats.min_improvements,
            "improvements_per_episode": stats.improvements_per_episode,
            "at_least_2": stats.fraction_with_at_least(2),
            "regressions": stats.regressions_observed,
            "final_nodes": stats.final_node_distribution,
        },
        "trace": trace,
    }))
}

fn js(r: Result<String, String>) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn bundle(name: &str) -> Result<String, JsError> {
    js(bundle_text(name))
}

#[wasm_bindgen]
pub fn compile(formula: &str, atoms: &str) -> Result<String, JsError> {
    js(compile_text(formula, atoms))
}

#[wasm_bindgen]
pub fn preference_graph(prefs: &str) -> Result<String, JsError> {
    js(preference_graph_text(prefs))
}

#[wasm_bindgen]
pub fn plan(grid: &str, prefs: &str, battery: u32, mode: &str, episodes: u32, seed: u32) -> Result<String, JsError> {
    js(plan_text(grid, prefs, battery, mode, episodes.into(), seed.into()))
}
