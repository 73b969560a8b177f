//! From a labeled MDP and a preference DFA to safe and improving strategies.

mod improvement;
mod product;
mod solver;
mod strategy;

pub use improvement::{classify_step, is_improvement, ImprovementMdp, Step, ZSets};
pub use product::{ProductError, ProductMdp, DEFAULT_PRODUCT_CAP};
pub use solver::{almost_sure_for_all, aswin, pwin, WinKind, WinningRegion};
pub use strategy::{
    CompositePolicy, Mode, NodeRegion, Phase, Planner, PolicyStep, RegionsDocument, Strategy, StrategyDocument,
    StrategyEntry, TieBreak,
};
