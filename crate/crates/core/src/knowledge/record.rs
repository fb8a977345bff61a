use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::db::{GoalTacticPair, Knowledge, TheoremRecord};
use super::globalize::{inline_aliases, qualify_refs};
use super::ortho::{compete, Competition, RecordSettings};
use super::script::{parse_script, Decl};
use crate::goalsys::{Goal, Interpreter, Tactic, TacticOutcome, ThmRef};

/// A theorem of the corpus with its script aliases already inlined.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusEntry {
    /// Position in corpus order.
    pub index: usize,
    pub theory: String,
    pub name: String,
    pub statement: Goal,
    pub proof: Tactic,
    pub file: PathBuf,
    pub line: usize,
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{file}:{line}:{column}: {message}")]
    Syntax {
        file: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{file}:{line}: theorem `{name}` declared before any `theory` header")]
    NoTheory { file: PathBuf, line: usize, name: String },
    #[error("{file}:{line}: theorem `{theory}.{name}` declared twice")]
    Duplicate {
        file: PathBuf,
        line: usize,
        theory: String,
        name: String,
    },
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

/// Parses one script. Aliases are local to the script and are inlined
/// into every later alias body and proof.
pub fn corpus_entries(text: &str, file: &Path, first_index: usize) -> Result<Vec<CorpusEntry>, CorpusError> {
    let decls = parse_script(text).map_err(|e| CorpusError::Syntax {
        file: file.to_path_buf(),
        line: e.line,
        column: e.column,
        message: e.message,
    })?;
    let mut aliases: BTreeMap<String, Tactic> = BTreeMap::new();
    let mut theory: Option<String> = None;
    let mut out = Vec::new();
    for d in decls {
        match d {
            Decl::Theory { name, .. } => theory = Some(name),
            Decl::Alias { name, body, .. } => {
                let (body, _) = inline_aliases(&body, &aliases);
                aliases.insert(name, body);
            }
            Decl::Theorem {
                name,
                statement,
                proof,
                line,
            } => {
                let Some(th) = theory.clone() else {
                    return Err(CorpusError::NoTheory {
                        file: file.to_path_buf(),
                        line,
                        name,
                    });
                };
                let (proof, unknown) = inline_aliases(&proof, &aliases);
                for a in unknown {
                    log::warn!("{}:{line}: unknown alias `{a}`", file.display());
                }
                out.push(CorpusEntry {
                    index: first_index + out.len(),
                    theory: th,
                    name,
                    statement,
                    proof,
                    file: file.to_path_buf(),
                    line,
                });
            }
        }
    }
    Ok(out)
}

/// Reads every `*.tac` file of `dir` in file-name order.
pub fn load_corpus(dir: &Path) -> Result<Vec<CorpusEntry>, CorpusError> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "tac"))
        .collect();
    files.sort();
    let mut out: Vec<CorpusEntry> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for f in files {
        let text = fs::read_to_string(&f)?;
        for e in corpus_entries(&text, &f, out.len())? {
            if !seen.insert((e.theory.clone(), e.name.clone())) {
                return Err(CorpusError::Duplicate {
                    file: f.clone(),
                    line: e.line,
                    theory: e.theory,
                    name: e.name,
                });
            }
            out.push(e);
        }
    }
    Ok(out)
}

/// One unit application observed while replaying a proof.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitEvent {
    pub unit: Tactic,
    pub goal: Goal,
    pub output: Vec<Goal>,
}

/// Executes `proof` on `g` unit by unit, with THEN/THENL semantics,
/// returning every unit application in execution order. Fails unless the
/// proof closes `g`.
pub fn trace_proof(interp: &Interpreter, proof: &Tactic, g: &Goal, unit_timeout: Duration) -> Result<Vec<UnitEvent>, String> {
    let mut events = Vec::new();
    let left = trace_rec(interp, proof, g, unit_timeout, &mut events)?;
    if !left.is_empty() {
        return Err(format!("{} goal(s) left open", left.len()));
    }
    Ok(events)
}

fn trace_rec(
    interp: &Interpreter,
    t: &Tactic,
    g: &Goal,
    timeout: Duration,
    events: &mut Vec<UnitEvent>,
) -> Result<Vec<Goal>, String> {
    match t {
        Tactic::Unit(_) => match interp.apply(t, g, timeout) {
            TacticOutcome::Success(out) => {
                events.push(UnitEvent {
                    unit: t.clone(),
                    goal: g.clone(),
                    output: out.clone(),
                });
                Ok(out)
            }
            TacticOutcome::Failure(r) => Err(format!("`{t}` failed on `{g}`: {r}")),
            TacticOutcome::Timeout => Err(format!("`{t}` timed out on `{g}`")),
        },
        Tactic::Then(a, b) => {
            let mut out = Vec::new();
            for sub in trace_rec(interp, a, g, timeout, events)? {
                out.extend(trace_rec(interp, b, &sub, timeout, events)?);
            }
            Ok(out)
        }
        Tactic::ThenL(a, bs) => {
            let subs = trace_rec(interp, a, g, timeout, events)?;
            if subs.len() != bs.len() {
                return Err(format!("THENL expects {} goals, got {}", bs.len(), subs.len()));
            }
            let mut out = Vec::new();
            for (sub, b) in subs.iter().zip(bs) {
                out.extend(trace_rec(interp, b, sub, timeout, events)?);
            }
            Ok(out)
        }
    }
}

/// What recording one theorem produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecordReport {
    pub theorem: String,
    pub globalized: String,
    pub unresolved: Vec<ThmRef>,
    /// Ids of the stored pairs, in execution order.
    pub pairs: Vec<usize>,
    pub competitions: Vec<Competition>,
    /// `None` when the proof replayed.
    pub failure: Option<String>,
    pub elapsed_ms: u64,
}

impl Knowledge {
    /// Environment in which `entry` is proved: every theorem recorded so
    /// far, unqualified names resolved in the entry's theory first.
    pub fn env_for(&self, theory: &str) -> crate::goalsys::TheoremEnv {
        self.env.with_theory(theory)
    }

    /// Replays the entry's proof, storing one (orthogonalized) pair per
    /// unit application, then adds the theorem itself. A proof that does
    /// not replay stores no pairs.
    pub fn record(&mut self, entry: &CorpusEntry, s: &RecordSettings) -> RecordReport {
        let start = Instant::now();
        self.env.set_theory(entry.theory.clone());
        let (proof, unresolved) = qualify_refs(&entry.proof, &self.env);
        let mut report = RecordReport {
            theorem: format!("{}.{}", entry.theory, entry.name),
            globalized: proof.to_string(),
            unresolved: unresolved.clone(),
            pairs: Vec::new(),
            competitions: Vec::new(),
            failure: None,
            elapsed_ms: 0,
        };
        let traced = {
            let interp = Interpreter::new(&self.env);
            trace_proof(&interp, &proof, &entry.statement, s.replay_timeout)
        };
        match traced {
            Ok(events) => {
                for ev in events {
                    let code = ev.unit.code();
                    let comp = compete(&code, &ev.goal, self, s);
                    // an abstraction may win on a goal it is already stored with
                    let stored = comp.memo || self.tactics.contains(&comp.winner().code, &ev.goal.key());
                    if !stored {
                        for rec in comp.goal_list_records() {
                            self.goal_lists.insert(rec);
                        }
                        let w = comp.winner();
                        let id = self.tactics.insert(GoalTacticPair {
                            goal: ev.goal.clone(),
                            tactic: w.code.clone(),
                            applied: w.applied.clone(),
                            output: comp.winner_output().to_vec(),
                            theory: entry.theory.clone(),
                            seq: 0,
                            theorem: entry.index,
                        });
                        report.pairs.push(id);
                    }
                    report.competitions.push(comp);
                }
            }
            Err(e) => {
                log::warn!("{}:{}: proof of `{}` does not replay: {e}", entry.file.display(), entry.line, entry.name);
                report.failure = Some(e);
            }
        }
        let mut deps: Vec<ThmRef> = Vec::new();
        for r in proof.thm_refs() {
            if r.theory.is_some() && !unresolved.contains(r) && !deps.contains(r) {
                deps.push(r.clone());
            }
        }
        self.env.add(&entry.theory, &entry.name, entry.statement.clone());
        self.theorems.insert(TheoremRecord {
            theory: entry.theory.clone(),
            name: entry.name.clone(),
            statement: entry.statement.clone(),
            dependencies: deps,
            seq: 0,
        });
        self.recorded += 1;
        report.elapsed_ms = start.elapsed().as_millis() as u64;
        report
    }
}

/// Records every entry in order.
pub fn build_knowledge(entries: &[CorpusEntry], s: &RecordSettings) -> (Knowledge, Vec<RecordReport>) {
    let mut kb = Knowledge::new();
    let reports = entries.iter().map(|e| kb.record(e, s)).collect();
    (kb, reports)
}
