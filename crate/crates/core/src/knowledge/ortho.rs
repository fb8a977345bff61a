use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::db::{GoalListRecord, Knowledge, Label};
use super::globalize::{abstract_tactic, instantiate_with};
use crate::goalsys::{goal_list_subsumed, goal_lists_equiv, Goal, Interpreter, TacticCode, TacticOutcome, ThmRef};
use crate::predict::goal_features;

/// Parameters of knowledge building.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecordSettings {
    pub orthogonalization: bool,
    pub abstraction: bool,
    /// Number of nearest pairs whose tactics enter a competition.
    pub ortho_radius: usize,
    /// Number of predicted theorems filling a placeholder.
    pub abs_radius: usize,
    /// Budget of each competing tactic.
    pub tactic_timeout: Duration,
    /// Budget of each unit while replaying a human proof.
    pub replay_timeout: Duration,
}

impl Default for RecordSettings {
    fn default() -> Self {
        RecordSettings {
            orthogonalization: true,
            abstraction: true,
            ortho_radius: 20,
            abs_radius: 16,
            tactic_timeout: Duration::from_millis(50),
            replay_timeout: Duration::from_secs(2),
        }
    }
}

/// The `n` theorems most similar to `g`, most similar first.
pub fn predict_theorems(kb: &Knowledge, g: &Goal, n: usize, keep: impl Fn(usize) -> bool) -> Vec<ThmRef> {
    let q = kb.theorems.features().encode(&goal_features(g));
    kb.theorems
        .predict(&q, n, keep)
        .into_iter()
        .map(|(id, _)| kb.theorems.get(id).reference())
        .collect()
}

/// Fills every placeholder of `code` with `abs_radius` theorems predicted
/// for `g`; codes without placeholders are returned unchanged.
pub fn instantiate(code: &TacticCode, g: &Goal, kb: &Knowledge, abs_radius: usize) -> TacticCode {
    let t = code.tactic();
    if !t.has_hole() {
        return code.clone();
    }
    let refs = predict_theorems(kb, g, abs_radius, |_| true);
    instantiate_with(&t, &refs).code()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    Abstraction,
    Predicted,
    Incumbent,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub code: TacticCode,
    pub applied: TacticCode,
    pub outcome: TacticOutcome,
    pub coverage: usize,
    pub origin: Origin,
    /// Succeeds on the goal and its output is subsumed by the incumbent's.
    pub subsumes: bool,
}

/// One orthogonalization competition on a goal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Competition {
    pub goal: Goal,
    pub incumbent: TacticCode,
    /// Candidates in tie-break order.
    pub candidates: Vec<Candidate>,
    pub winner: usize,
    /// The incumbent was already stored with this goal; nothing was run.
    pub memo: bool,
}

impl Competition {
    pub fn winner(&self) -> &Candidate {
        &self.candidates[self.winner]
    }

    pub fn winner_output(&self) -> &[Goal] {
        self.winner().outcome.goals().unwrap_or(&[])
    }

    /// The winner's output is a positive example; every other successful
    /// candidate's output is a negative one unless it equals the winner's.
    pub fn goal_list_records(&self) -> Vec<GoalListRecord> {
        if self.memo {
            return Vec::new();
        }
        let win = self.winner_output().to_vec();
        let mut out = vec![GoalListRecord {
            goals: win.clone(),
            origin_goal: self.goal.clone(),
            label: Label::Positive,
            seq: 0,
        }];
        for (i, c) in self.candidates.iter().enumerate() {
            if i == self.winner {
                continue;
            }
            if let TacticOutcome::Success(goals) = &c.outcome {
                if !goal_lists_equiv(goals, &win) {
                    out.push(GoalListRecord {
                        goals: goals.clone(),
                        origin_goal: self.goal.clone(),
                        label: Label::Negative,
                        seq: 0,
                    });
                }
            }
        }
        out
    }
}

/// `t1` subsumes `t2` on `g`: both succeed and every goal of `t1(g)` is
/// alpha-equivalent to a goal of `t2(g)`.
pub fn subsumes_tactic(interp: &Interpreter, t1: &TacticCode, t2: &TacticCode, g: &Goal, timeout: Duration) -> bool {
    let a = interp.apply_code(t1, g, timeout);
    let b = interp.apply_code(t2, g, timeout);
    match (a, b) {
        (TacticOutcome::Success(x), TacticOutcome::Success(y)) => goal_list_subsumed(&x, &y),
        _ => false,
    }
}

/// Runs the competition deciding which tactic is stored with `g` in place
/// of `t`. Pool: the abstraction of `t`, the tactics of the nearest stored
/// pairs (earliest stored first), then `t`. The winner has maximal coverage
/// among candidates subsuming `t` on `g`, earliest in pool order on ties.
pub fn compete(t: &TacticCode, g: &Goal, kb: &Knowledge, s: &RecordSettings) -> Competition {
    let interp = Interpreter::new(&kb.env);
    let mut thms: Option<Vec<ThmRef>> = None;
    let mut concretize = |code: &TacticCode| -> TacticCode {
        let tac = code.tactic();
        if !tac.has_hole() {
            return code.clone();
        }
        let refs = thms.get_or_insert_with(|| predict_theorems(kb, g, s.abs_radius, |_| true));
        instantiate_with(&tac, refs).code()
    };

    let t_applied = concretize(t);
    let t_outcome = interp.apply_code(&t_applied, g, s.tactic_timeout);
    let t_cov = kb.tactics.coverage(t);
    let incumbent = Candidate {
        code: t.clone(),
        applied: t_applied,
        subsumes: t_outcome.is_success(),
        outcome: t_outcome.clone(),
        coverage: t_cov,
        origin: Origin::Incumbent,
    };
    let memo = kb.tactics.contains(t, &g.key());
    if memo || !s.orthogonalization || !t_outcome.is_success() {
        return Competition {
            goal: g.clone(),
            incumbent: t.clone(),
            candidates: vec![incumbent],
            winner: 0,
            memo,
        };
    }
    let t_out = t_outcome.goals().unwrap_or(&[]).to_vec();

    let mut pool: Vec<(TacticCode, Origin)> = Vec::new();
    if s.abstraction {
        if let Some(abs) = abstract_tactic(t) {
            if abs.code != *t {
                pool.push((abs.code, Origin::Abstraction));
            }
        }
    }
    let q = kb.tactics.features().encode(&goal_features(g));
    let mut predicted: Vec<TacticCode> = Vec::new();
    for (id, _) in kb.tactics.predict(&q, s.ortho_radius, |_| true) {
        let code = &kb.tactics.get(id).tactic;
        if !predicted.contains(code) {
            predicted.push(code.clone());
        }
    }
    predicted.sort_by_key(|c| kb.tactics.first_seen(c));
    pool.extend(predicted.into_iter().map(|c| (c, Origin::Predicted)));

    let mut candidates: Vec<Candidate> = Vec::new();
    for (code, origin) in pool {
        if code == *t || candidates.iter().any(|c| c.code == code) {
            continue;
        }
        let applied = concretize(&code);
        let outcome = interp.apply_code(&applied, g, s.tactic_timeout);
        let subsumes = matches!(&outcome, TacticOutcome::Success(out) if goal_list_subsumed(out, &t_out));
        let mut coverage = kb.tactics.coverage(&code);
        if origin == Origin::Abstraction {
            coverage = coverage.max(t_cov);
        }
        candidates.push(Candidate {
            code,
            applied,
            outcome,
            coverage,
            origin,
            subsumes,
        });
    }
    candidates.push(incumbent);

    let mut winner = candidates.len() - 1;
    for (i, c) in candidates.iter().enumerate() {
        if c.subsumes && c.coverage > candidates[winner].coverage {
            winner = i;
        }
    }
    // earliest candidate among those with the winning coverage
    let best = candidates[winner].coverage;
    winner = candidates
        .iter()
        .position(|c| c.subsumes && c.coverage == best)
        .expect("incumbent subsumes itself");
    Competition {
        goal: g.clone(),
        incumbent: t.clone(),
        candidates,
        winner,
        memo: false,
    }
}

/// Tactic stored with `g` in place of `t`.
pub fn orthogonalize(t: &TacticCode, g: &Goal, kb: &Knowledge, s: &RecordSettings) -> TacticCode {
    compete(t, g, kb, s).winner().code.clone()
}
