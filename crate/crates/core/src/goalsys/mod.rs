//! Terms, goals, the tactic language and its interpreter.

mod env;
mod goal;
mod interp;
mod parse;
pub mod rewrite;
mod tactic;
mod term;

pub use env::{TheoremEnv, BASE_DEFINITIONS, BASE_THEORY};
pub use goal::{alpha_equiv, goal_list_subsumed, goal_lists_equiv, Goal, GoalKey};
pub use interp::{apply_tactic, replay_proof, Interpreter, RewriteReport, TacticOutcome};
pub use parse::{is_var_name, parse_goal, parse_term, SyntaxError};
pub use tactic::{TacUnit, Tactic, TacticCode, ThmList, ThmRef, HOLE};
pub use term::{Equation, Sort, Symbol, Term};


pub(crate) use parse::{parse_goal_at, Cursor};
pub(crate) use tactic::parse_tactic_at;
