//! Learned tactic selection and Monte Carlo proof search over a small
//! equational logic of natural numbers and lists.

pub mod goalsys;
pub mod knowledge;
pub mod predict;
pub mod proofout;
pub mod search;
pub mod harness;
