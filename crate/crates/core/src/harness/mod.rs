//! Chronological re-proving, parameter tuning and one-shot proving over a
//! corpus of scripts.

mod report;
mod tune;

use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use crate::goalsys::{parse_goal, SyntaxError};
use crate::proofout::{sidecar, ProofSidecar};
use crate::knowledge::{build_knowledge, load_corpus, CorpusEntry, CorpusError, Knowledge, RecordReport};
use crate::search::{search_in, ConfigError, SearchConfig, SearchStatus};

pub use report::{RunReport, TheoremRun};
pub use tune::{grid_configs};
pub use tune::{parse_grid, tune, tune_slice, Assignment, Grid, TuneRow, TuneTable};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("goal: {0}")]
    Goal(#[from] SyntaxError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Grid(String),
}

/// Loads the corpus in `dir` and records every proof in order.
pub fn build(dir: &Path, config: &SearchConfig) -> Result<(Knowledge, Vec<RecordReport>), HarnessError> {
    let entries = load_corpus(dir)?;
    Ok(build_knowledge(&entries, &config.record_settings()))
}

/// For each entry in order: search its statement with the knowledge of
/// the entries before it (when `attempt` admits the entry), then record its
/// own proof.
pub fn reprove_entries(entries: &[CorpusEntry], config: &SearchConfig, attempt: impl Fn(&CorpusEntry) -> bool) -> RunReport {
    let settings = config.record_settings();
    let mut kb = Knowledge::new();
    let mut runs = Vec::new();
    for e in entries {
        if attempt(e) {
            let status = search_in(&e.statement, &kb, &e.theory, config);
            assert!(
                status.stats.latest_pair_theorem.is_none_or(|i| i < e.index),
                "search for theorem {} used a pair from theorem {:?}",
                e.index,
                status.stats.latest_pair_theorem
            );
            assert!(status.stats.latest_theorem_id.is_none_or(|id| id < kb.theorems.len()));
            let env = kb.env_for(&e.theory);
            log::info!("{}.{}: {} ({} steps)", e.theory, e.name, status.label(), status.stats.steps);
            runs.push(TheoremRun::new(e, &status, &env));
        }
        kb.record(e, &settings);
    }
    RunReport::new(config.clone(), runs)
}

/// [`reprove_entries`] on every theorem of the corpus in `dir`.
pub fn reprove(dir: &Path, config: &SearchConfig) -> Result<RunReport, HarnessError> {
    let entries = load_corpus(dir)?;
    Ok(reprove_entries(&entries, config, |_| true))
}

/// Result of a one-shot search.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProveOutput {
    pub status: SearchStatus,
    /// Present when a proof was found.
    pub sidecar: Option<ProofSidecar>,
}

/// Searches for `goal` against the knowledge of the whole corpus, with the
/// last theory's names in scope.
pub fn prove(goal: &str, dir: &Path, config: &SearchConfig) -> Result<ProveOutput, HarnessError> {
    let g = parse_goal(goal)?;
    let (kb, _) = build(dir, config)?;
    let theory = kb.env.current_theory().to_string();
    let status = search_in(&g, &kb, &theory, config);
    let sidecar = status.proof().map(|p| sidecar(goal, &p.script, &g, &kb.env_for(&theory)));
    Ok(ProveOutput { status, sidecar })
}
