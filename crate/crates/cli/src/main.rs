mod commands;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

pub const DEFAULT_SEED: u64 = 20_240_601;

/// Qualitative planning in labeled MDPs under incomplete preferences over
/// co-safe temporal goals.
#[derive(Debug, Parser)]
#[command(name = "prefplan", version)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Directory for artifacts; created if missing.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Upper bound on automaton and product states.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    pub max_states: usize,
}

/// Inputs shared by every subcommand that plans on an MDP.
#[derive(Debug, Args)]
pub struct PlanInput {
    /// MDP JSON, or a gridworld config that is expanded first.
    pub mdp: PathBuf,
    /// Preference declaration file (JSON).
    pub prefs: PathBuf,
    /// Battery capacity override for gridworld configs.
    #[arg(long)]
    pub battery: Option<u32>,
    /// Drift stay probability override for gridworld configs.
    #[arg(long)]
    pub stay_probability: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Spi,
    Sasi,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TieBreakArg {
    Lowest,
    Random,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compile an scLTL formula file into a DFA (dfa.json, dfa.dot).
    Compile {
        /// Text file holding one formula.
        formula: PathBuf,
        /// Comma-separated atoms; inferred from the formula when omitted.
        #[arg(long, value_delimiter = ',')]
        atoms: Option<Vec<String>>,
    },
    /// Build the preference DFA and its preference graph (prefdfa.json,
    /// prefdfa.dot, spec.json).
    Prefdfa {
        /// Preference declaration file (JSON).
        prefs: PathBuf,
    },
    /// Expand a gridworld config into an MDP (mdp.json, mdp.dot).
    Gridworld {
        /// Gridworld config (JSON).
        config: PathBuf,
        /// Battery capacity override.
        #[arg(long)]
        battery: Option<u32>,
        /// Drift stay probability override.
        #[arg(long)]
        stay_probability: Option<f64>,
    },
    /// Synthesize SPI and SASI strategies (strategy_spi.json,
    /// strategy_sasi.json, regions.json, improvement.dot).
    Synth {
        #[command(flatten)]
        input: PlanInput,
    },
    /// Check the synthesized strategies against both safety and improvement
    /// conditions (verify.json); exits 2 when a check fails.
    Verify {
        #[command(flatten)]
        input: PlanInput,
        /// Which strategy to check.
        #[arg(long, value_enum, default_value = "both")]
        mode: ModeArg,
    },
    /// Roll out the composite policy (stats.json, episodes.csv); exits 2 when
    /// a regression is observed.
    Simulate {
        #[command(flatten)]
        input: PlanInput,
        /// Number of episodes.
        #[arg(long, default_value_t = 10_000)]
        episodes: u64,
        /// Master seed; episode i uses stream i of this seed.
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Steps per episode; defaults to ten times the product size.
        #[arg(long)]
        horizon: Option<u64>,
        /// Improving strategy driving the policy.
        #[arg(long, value_enum, default_value = "sasi")]
        mode: ModeArg,
        /// How to pick among permitted actions.
        #[arg(long, value_enum, default_value = "lowest")]
        tie_break: TieBreakArg,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            let cap = e.chain().any(|c| c.downcast_ref::<prefplan::Error>().is_some_and(prefplan::Error::is_resource_cap));
            ExitCode::from(if cap { 3 } else { 1 })
        }
    }
}
