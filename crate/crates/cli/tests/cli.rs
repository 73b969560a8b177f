use prefplan::mdp::{build_gridworld, GridworldConfig, LabeledMdp};
use prefplan::preference::SpecReport;
use prefplan::scltl::{Dfa, DfaDocument};
use prefplan::synthesis::{RegionsDocument, StrategyDocument};
use prefplan::verify::{ConditionsReport, EpisodeStats};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use tempfile::TempDir;

fn bundle(name: &str, file: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../bundles").join(name).join(file)
}

fn prefplan(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_prefplan"))
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn compile_writes_a_two_state_dfa() {
    let dir = TempDir::new().unwrap();
    let f = dir.path().join("f.ltl");
    fs::write(&f, "F A\n").unwrap();
    let o = prefplan(dir.path(), &["compile", path(&f)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let doc: DfaDocument = serde_json::from_str(&read(dir.path(), "dfa.json")).unwrap();
    assert_eq!(doc.states.len(), 2);
    assert_eq!(doc.accepting.len(), 1);
    let dfa = Dfa::from_document(&doc).unwrap();
    assert_eq!(dfa.to_document(), doc);
    assert!(read(dir.path(), "dfa.dot").starts_with("digraph"));
}

#[test]
fn compile_with_declared_atoms() {
    let dir = TempDir::new().unwrap();
    let f = dir.path().join("f.ltl");
    fs::write(&f, "!b U a").unwrap();
    let o = prefplan(dir.path(), &["compile", path(&f), "--atoms", "a,b,c"]);
    assert_eq!(code(&o), 0);
    let doc: DfaDocument = serde_json::from_str(&read(dir.path(), "dfa.json")).unwrap();
    assert_eq!(doc.atoms, ["a", "b", "c"]);
    assert_eq!(doc.alphabet.len(), 8);
}

#[test]
fn prefdfa_on_po1() {
    let dir = TempDir::new().unwrap();
    let o = prefplan(dir.path(), &["prefdfa", path(&bundle("po1", "preferences.json"))]);
    assert_eq!(code(&o), 0);
    let doc: serde_json::Value = serde_json::from_str(&read(dir.path(), "prefdfa.json")).unwrap();
    assert_eq!(doc["states"].as_array().unwrap().len(), 8);
    let spec: SpecReport = serde_json::from_str(&read(dir.path(), "spec.json")).unwrap();
    assert_eq!(spec.strict.len(), 2);
    assert!(read(dir.path(), "prefdfa.dot").contains("cluster"));
}

#[test]
fn gridworld_expands_and_round_trips() {
    let dir = TempDir::new().unwrap();
    let cfg_path = bundle("po1", "gridworld.json");
    let o = prefplan(dir.path(), &["gridworld", path(&cfg_path), "--battery", "2"]);
    assert_eq!(code(&o), 0);
    let loaded = LabeledMdp::from_json(&read(dir.path(), "mdp.json")).unwrap();
    let mut cfg: GridworldConfig = serde_json::from_str(&fs::read_to_string(&cfg_path).unwrap()).unwrap();
    cfg.battery_capacity = 2;
    assert_eq!(loaded, build_gridworld(&cfg).unwrap());
}

#[test]
fn synth_artifacts_reload() {
    let dir = TempDir::new().unwrap();
    let (mdp, prefs) = (bundle("po1", "gridworld.json"), bundle("po1", "preferences.json"));
    let o = prefplan(dir.path(), &["synth", path(&mdp), path(&prefs)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for name in ["strategy_spi.json", "strategy_sasi.json"] {
        let text = read(dir.path(), name);
        let doc: StrategyDocument = serde_json::from_str(&text).unwrap();
        assert_eq!(serde_json::to_string_pretty(&doc).unwrap() + "\n", text);
    }
    let sasi: StrategyDocument = serde_json::from_str(&read(dir.path(), "strategy_sasi.json")).unwrap();
    let start = sasi.entries.iter().find(|e| e.state == "(2,1)b4|q0").unwrap();
    assert_eq!(start.actions, ["West"]);
    let regions: RegionsDocument = serde_json::from_str(&read(dir.path(), "regions.json")).unwrap();
    // Visiting both B and E is out of reach on this battery.
    assert_eq!(regions.nodes.len(), 3);
    assert!(read(dir.path(), "improvement.dot").starts_with("digraph"));
}

#[test]
fn verify_po1_passes() {
    let dir = TempDir::new().unwrap();
    let (mdp, prefs) = (bundle("po1", "gridworld.json"), bundle("po1", "preferences.json"));
    let o = prefplan(dir.path(), &["verify", path(&mdp), path(&prefs)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let reports: Vec<ConditionsReport> = serde_json::from_str(&read(dir.path(), "verify.json")).unwrap();
    assert_eq!(reports.len(), 2);
    assert!(reports.iter().all(ConditionsReport::passed));
}

#[test]
fn simulate_is_deterministic() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    let (mdp, prefs) = (bundle("po2", "gridworld.json"), bundle("po2", "preferences.json"));
    let args = ["simulate", path(&mdp), path(&prefs), "--episodes", "500", "--seed", "11"];
    for dir in [&a, &b] {
        let o = prefplan(dir.path(), &args);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    for name in ["stats.json", "episodes.csv"] {
        assert_eq!(read(a.path(), name), read(b.path(), name), "{name}");
    }
    let stats: EpisodeStats = serde_json::from_str(&read(a.path(), "stats.json")).unwrap();
    assert_eq!(stats.episodes, 500);
    assert_eq!(stats.regressions_observed, 0);
    assert!(stats.min_improvements >= 2);
    let csv = read(a.path(), "episodes.csv");
    assert!(csv.starts_with("episode,seed,steps,improvements,regressions,final_node,truncated\n"));
    assert_eq!(csv.lines().count(), 501);
}

#[test]
fn simulate_rejects_both_modes() {
    let dir = TempDir::new().unwrap();
    let (mdp, prefs) = (bundle("po2", "gridworld.json"), bundle("po2", "preferences.json"));
    let o = prefplan(dir.path(), &["simulate", path(&mdp), path(&prefs), "--mode", "both"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn malformed_preferences_exit_1() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"atoms": ["A"], "outcomes": [{"name": "A", "formula": "F ("}]}"#).unwrap();
    let o = prefplan(dir.path(), &["prefdfa", path(&bad)]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
    fs::write(&bad, "not json").unwrap();
    assert_eq!(code(&prefplan(dir.path(), &["prefdfa", path(&bad)])), 1);
}

#[test]
fn contradictory_preferences_exit_1() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("cycle.json");
    fs::write(
        &bad,
        r#"{"atoms": ["A", "B"],
            "outcomes": [{"name": "A", "formula": "F A"}, {"name": "B", "formula": "F B"}],
            "preferences": [{"kind": "strict", "better": "A", "worse": "B"},
                            {"kind": "strict", "better": "B", "worse": "A"}]}"#,
    )
    .unwrap();
    assert_eq!(code(&prefplan(dir.path(), &["prefdfa", path(&bad)])), 1);
}

#[test]
fn state_cap_exits_3() {
    let dir = TempDir::new().unwrap();
    let f = dir.path().join("f.ltl");
    fs::write(&f, "F (a & X F b)").unwrap();
    let o = prefplan(dir.path(), &["--max-states", "1", "compile", path(&f)]);
    assert_eq!(code(&o), 3);
    let (mdp, prefs) = (bundle("po1", "gridworld.json"), bundle("po1", "preferences.json"));
    let o = prefplan(dir.path(), &["--max-states", "20", "synth", path(&mdp), path(&prefs)]);
    assert_eq!(code(&o), 3);
}

#[test]
fn usage_errors_exit_1_and_help_exits_0() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&prefplan(dir.path(), &["frobnicate"])), 1);
    assert_eq!(code(&prefplan(dir.path(), &["synth"])), 1);
    let help = prefplan(dir.path(), &["simulate", "--help"]);
    assert_eq!(code(&help), 0);
    let text = String::from_utf8_lossy(&help.stdout);
    for flag in ["--episodes", "--seed", "--horizon", "--mode", "--tie-break", "--battery", "--out", "--max-states"] {
        assert!(text.contains(flag), "{flag} missing from help");
    }
}
