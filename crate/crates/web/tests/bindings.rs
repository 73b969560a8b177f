use prefplan_web::{bundle_text, compile_text, plan_text, preference_graph_text};
use serde_json::Value;

fn parse(text: &str) -> Value {
    serde_json::from_str(text).unwrap()
}

fn po1() -> (String, String) {
    let b = parse(&bundle_text("po1").unwrap());
    (b["gridworld"].as_str().unwrap().to_string(), b["preferences"].as_str().unwrap().to_string())
}

#[test]
fn compile_reports_states_and_dot() {
    let out = parse(&compile_text("F (a & X F b)", "a, b").unwrap());
    assert_eq!(out["states"], 3);
    assert_eq!(out["accepting"], 1);
    assert!(out["dot"].as_str().unwrap().starts_with("digraph"));
    assert!(compile_text("F (", "a").is_err());
    assert!(compile_text("F c", "a").is_err());
}

#[test]
fn preference_graph_for_po1() {
    let (_, prefs) = po1();
    let out = parse(&preference_graph_text(&prefs).unwrap());
    assert_eq!(out["states"], 8);
    assert_eq!(out["nodes"].as_array().unwrap().len(), 4);
    assert_eq!(out["edges"].as_array().unwrap().len(), 3);
}

#[test]
fn plan_on_po1_is_deterministic() {
    let (grid, prefs) = po1();
    let a = plan_text(&grid, &prefs, 4, "sasi", 200, 7).unwrap();
    assert_eq!(a, plan_text(&grid, &prefs, 4, "sasi", 200, 7).unwrap());
    let out = parse(&a);
    assert_eq!(out["start"], "(2,1)b4|q0");
    assert_eq!(out["sasi_at_start"], serde_json::json!(["West"]));
    assert_eq!(out["conditions"]["condition_b"], true);
    assert_eq!(out["stats"]["regressions"], 0);
    let trace = out["trace"].as_array().unwrap();
    assert_eq!(trace[0]["action"], "West");
    assert_eq!((trace[0]["col"].as_u64(), trace[0]["row"].as_u64()), (Some(2), Some(1)));
}

#[test]
fn plan_rejects_bad_input() {
    let (grid, prefs) = po1();
    assert!(plan_text(&grid, &prefs, 4, "both", 10, 0).is_err());
    assert!(plan_text("{}", &prefs, 4, "spi", 10, 0).is_err());
    assert!(bundle_text("po3").is_err());
}
