//! Independent checks of the synthesized artifacts: a numeric reachability
//! oracle, exhaustive condition checking on induced chains, and seeded
//! simulation.

mod chain;
mod sim;
mod value;

pub use chain::{check_strategy_conditions, ChainEdge, ConditionResult, ConditionsReport, Counterexample, InducedChain};
pub use sim::{
    default_horizon, exact_final_distribution, monte_carlo, EpisodeRecord, EpisodeStats, FixedPolicy, Policy,
    SimConfig,
};
pub use value::value_iteration;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error("value iteration did not converge in {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
    #[error("target set is empty")]
    EmptyTarget,
    #[error("strategy is undefined everywhere")]
    EmptyDomain,
    #[error("strategy picks action {action:?} at {state}, which the product does not offer there")]
    Integrity { state: String, action: String },
    #[error("episodes and horizon must be at least 1")]
    BadSimulation,
}
