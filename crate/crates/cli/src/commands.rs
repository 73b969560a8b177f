use crate::{Cli, Command, Common, ModeArg, PlanInput, TieBreakArg};
use anyhow::{bail, Context, Result};
use prefplan::automaton::PreferenceDfa;
use prefplan::mdp::{build_gridworld, GridworldConfig, LabeledMdp};
use prefplan::preference::{PreferenceDeclarations, PreferenceSpec, SpecReport};
use prefplan::scltl::{parse, to_dfa_with_cap, Alphabet, ParseError};
use prefplan::synthesis::{CompositePolicy, Mode, Planner, ProductMdp, TieBreak};
use prefplan::verify::{check_strategy_conditions, default_horizon, monte_carlo, SimConfig, VerifyError};
use prefplan::Error;
use serde_json::json;
use std::fs;
use std::path::Path;

pub fn run(cli: &Cli) -> Result<u8> {
    let c = &cli.common;
    match &cli.command {
        Command::Compile { formula, atoms } => compile(c, formula, atoms.as_deref()),
        Command::Prefdfa { prefs } => prefdfa(c, prefs),
        Command::Gridworld { config, battery, stay_probability } => {
            let mdp = expand_gridworld(&read(config)?, *battery, *stay_probability)?;
            write(c, "mdp.json", &pretty(&mdp.to_document())?)?;
            write(c, "mdp.dot", &mdp.to_dot())?;
            eprintln!("{} states, {} actions", mdp.len(), mdp.actions().len());
            Ok(0)
        }
        Command::Synth { input } => synth(c, input),
        Command::Verify { input, mode } => verify(c, input, *mode),
        Command::Simulate { input, episodes, seed, horizon, mode, tie_break } => {
            let mode = match mode {
                ModeArg::Spi => Mode::Spi,
                ModeArg::Sasi => Mode::Sasi,
                ModeArg::Both => bail!("simulate needs --mode spi or --mode sasi"),
            };
            let tie = match tie_break {
                TieBreakArg::Lowest => TieBreak::Lowest,
                TieBreakArg::Random => TieBreak::Random,
            };
            simulate(c, input, *episodes, *seed, *horizon, mode, tie)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn pretty<T: serde::Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn write(c: &Common, name: &str, content: &str) -> Result<()> {
    fs::create_dir_all(&c.out).with_context(|| format!("cannot create {}", c.out.display()))?;
    let path = c.out.join(name);
    fs::write(&path, content).with_context(|| format!("cannot write {}", path.display()))?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

/// Parses `text`, declaring each atom the parser reports as undeclared.
fn parse_inferring_atoms(text: &str) -> Result<(prefplan::scltl::Formula, Alphabet)> {
    let mut names: Vec<String> = Vec::new();
    loop {
        let ab = Alphabet::new(names.clone()).map_err(|e| anyhow::anyhow!(e))?;
        match parse(text, &ab) {
            Ok(f) => return Ok((f, ab)),
            Err(ParseError::Undeclared { name, .. }) if !names.contains(&name) => names.push(name),
            Err(e) => return Err(Error::from(e).into()),
        }
    }
}

fn compile(c: &Common, path: &Path, atoms: Option<&[String]>) -> Result<u8> {
    let text = read(path)?;
    let text = text.trim();
    let (f, ab) = match atoms {
        Some(a) => {
            let ab = Alphabet::new(a.iter().cloned()).context("bad --atoms")?;
            (parse(text, &ab).map_err(Error::from)?, ab)
        }
        None => parse_inferring_atoms(text)?,
    };
    let dfa = to_dfa_with_cap(&f, &ab, c.max_states).map_err(Error::from)?;
    write(c, "dfa.json", &pretty(&dfa.to_document())?)?;
    write(c, "dfa.dot", &dfa.to_dot())?;
    eprintln!("{f}: {} states, {} accepting", dfa.len(), dfa.accepting_states().count());
    Ok(0)
}

fn load_prefs(c: &Common, path: &Path) -> Result<(PreferenceSpec, PreferenceDfa)> {
    let decl: PreferenceDeclarations = serde_json::from_str(&read(path)?)
        .with_context(|| format!("{} is not a valid preference file", path.display()))?;
    let spec = PreferenceSpec::build(&decl).map_err(Error::from)?;
    let pdfa = PreferenceDfa::build_with_cap(&spec, c.max_states).map_err(Error::from)?;
    Ok((spec, pdfa))
}

fn prefdfa(c: &Common, path: &Path) -> Result<u8> {
    let (spec, pdfa) = load_prefs(c, path)?;
    write(c, "spec.json", &pretty(&SpecReport::from(&spec))?)?;
    write(c, "prefdfa.json", &pretty(&pdfa.to_document())?)?;
    write(c, "prefdfa.dot", &pdfa.to_dot())?;
    eprintln!(
        "{} states, {} final, {} nodes, {} edges",
        pdfa.len(),
        pdfa.final_count(),
        pdfa.nodes().len(),
        pdfa.edges().len()
    );
    Ok(0)
}

fn expand_gridworld(text: &str, battery: Option<u32>, stay: Option<f64>) -> Result<LabeledMdp> {
    let mut cfg: GridworldConfig = serde_json::from_str(text).context("not a valid gridworld config")?;
    if let Some(b) = battery {
        cfg.battery_capacity = b;
    }
    if let Some(p) = stay {
        cfg.stay_probability = p;
    }
    Ok(build_gridworld(&cfg).map_err(Error::from)?)
}

fn load_mdp(input: &PlanInput) -> Result<LabeledMdp> {
    let text = read(&input.mdp)?;
    let value: serde_json::Value =
        serde_json::from_str(&text).with_context(|| format!("{} is not JSON", input.mdp.display()))?;
    if value.get("width").is_some() {
        return expand_gridworld(&text, input.battery, input.stay_probability);
    }
    if input.battery.is_some() || input.stay_probability.is_some() {
        bail!("--battery and --stay-probability only apply to gridworld configs");
    }
    LabeledMdp::from_json(&text).map_err(|e| Error::from(e).into())
}

fn planner(c: &Common, input: &PlanInput) -> Result<Planner> {
    let mdp = load_mdp(input)?;
    let (_, pdfa) = load_prefs(c, &input.prefs)?;
    let pm = ProductMdp::build_with_cap(&mdp, &pdfa, c.max_states).map_err(Error::from)?;
    Ok(Planner::new(pm))
}

fn synth(c: &Common, input: &PlanInput) -> Result<u8> {
    let p = planner(c, input)?;
    let pm = p.product();
    for mode in [Mode::Spi, Mode::Sasi] {
        let s = p.strategy(mode);
        write(c, &format!("strategy_{}.json", mode.name()), &pretty(&s.to_document(pm))?)?;
    }
    write(c, "regions.json", &pretty(&p.regions_document())?)?;
    write(c, "improvement.dot", &p.improvement_dot())?;
    let v0 = pm.initial()[0].0;
    eprintln!("{} product states", pm.len());
    for mode in [Mode::Spi, Mode::Sasi] {
        let s = p.strategy(mode);
        let at = match s.at(v0) {
            Some(acts) => acts.iter().map(|&a| pm.mdp().action_name(a)).collect::<Vec<_>>().join(","),
            None => "undefined".into(),
        };
        eprintln!("{}: defined on {} states; at {}: {at}", mode.name(), s.domain().len(), pm.state_name(v0));
    }
    Ok(0)
}

fn verify(c: &Common, input: &PlanInput, mode: ModeArg) -> Result<u8> {
    let p = planner(c, input)?;
    let modes: &[Mode] = match mode {
        ModeArg::Spi => &[Mode::Spi],
        ModeArg::Sasi => &[Mode::Sasi],
        ModeArg::Both => &[Mode::Spi, Mode::Sasi],
    };
    let mut reports = Vec::new();
    let mut ok = true;
    for &m in modes {
        match check_strategy_conditions(&p, p.strategy(m)) {
            Ok(r) => {
                let verdict = |b: bool| if b { "pass" } else { "FAIL" };
                eprintln!(
                    "{}: condition (a) {}, condition (b) {} ({} domain states, {} chain states)",
                    m.name(),
                    verdict(r.condition_a.passed),
                    verdict(r.condition_b.passed),
                    r.domain_size,
                    r.chain_states
                );
                ok &= r.passed();
                reports.push(serde_json::to_value(&r)?);
            }
            Err(VerifyError::EmptyDomain) => {
                eprintln!("{}: undefined everywhere, nothing to check", m.name());
                reports.push(json!({ "mode": m, "skipped": "undefined everywhere" }));
            }
            Err(e) => return Err(Error::from(e).into()),
        }
    }
    write(c, "verify.json", &pretty(&reports)?)?;
    Ok(if ok { 0 } else { 2 })
}

fn simulate(
    c: &Common,
    input: &PlanInput,
    episodes: u64,
    seed: u64,
    horizon: Option<u64>,
    mode: Mode,
    tie: TieBreak,
) -> Result<u8> {
    let p = planner(c, input)?;
    let cfg = SimConfig { episodes, horizon: horizon.unwrap_or_else(|| default_horizon(&p)), seed };
    let policy = CompositePolicy::new(&p, mode, tie);
    let stats = monte_carlo(&p, &policy, cfg).map_err(Error::from)?;
    write(c, "stats.json", &pretty(&stats)?)?;
    write(c, "episodes.csv", &stats.to_csv())?;
    eprintln!(
        "{} episodes: min {} improvements, {:.4} with at least 2, {} regressions, {} truncated",
        stats.episodes,
        stats.min_improvements,
        stats.fraction_with_at_least(2),
        stats.regressions_observed,
        stats.truncated_episodes
    );
    if stats.regressions_observed > 0 {
        eprintln!("regressions observed under an improving policy");
        return Ok(2);
    }
    Ok(0)
}
