//! Monte Carlo tree search over tactic applications.

mod config;
mod mcts;
mod policy;
mod tree;

pub use config::{ConfigError, SearchConfig};
pub use mcts::{
    child_value, prior_evaluation, search, search_in, select_node, widening_for, Candidate, Extension, ExtensionFailure, Search, SearchOutcome, SearchStats,
    SearchStatus, RESEARCH_C_POLICY,
};
pub use policy::{cur_evaluation, cur_policy, evaluation_ratio, node_value, prior_policy, widening_policy};
pub use tree::{AppliedTactic, GoalSlot, NodeId, SearchNode, SearchTree};
