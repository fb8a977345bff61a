use std::collections::{BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::db::{sort_predictions, ScoredPredictions, SimKind};
use super::features::goal_features;
use crate::goalsys::{Goal, GoalKey};
use crate::knowledge::{Knowledge, TacticDb, TheoremDb};

/// Pairs producing each goal key, in corpus order.
fn producers(db: &TacticDb) -> HashMap<GoalKey, Vec<usize>> {
    let mut out: HashMap<GoalKey, Vec<usize>> = HashMap::new();
    for (id, p) in db.pairs().iter().enumerate() {
        let mut seen = HashSet::new();
        for g in &p.output {
            let k = g.key();
            if seen.insert(k.clone()) {
                out.entry(k).or_default().push(id);
            }
        }
    }
    out
}

/// Parent of each pair: the first other pair whose recorded output
/// contains the pair's goal.
pub fn pair_parents(db: &TacticDb) -> Vec<Option<usize>> {
    let prod = producers(db);
    (0..db.len())
        .map(|id| prod.get(db.key(id)).and_then(|ps| ps.iter().copied().find(|&p| p != id)))
        .collect()
}

/// Parent of each theorem: the first theorem listing it as a dependency.
pub fn theorem_parents(db: &TheoremDb) -> Vec<Option<usize>> {
    let mut parents = vec![None; db.len()];
    for (id, rec) in db.records().iter().enumerate() {
        for d in &rec.dependencies {
            if let Some(dep) = db.id_of(d) {
                if dep != id && parents[dep].is_none() {
                    parents[dep] = Some(id);
                }
            }
        }
    }
    parents
}

/// Every pair reachable from `seed` by following recorded outputs to the
/// pairs stored for those goals.
pub fn dependency_closure_pairs(db: &TacticDb, seed: usize) -> BTreeSet<usize> {
    let mut by_goal: HashMap<&GoalKey, Vec<usize>> = HashMap::new();
    for id in 0..db.len() {
        by_goal.entry(db.key(id)).or_default().push(id);
    }
    let mut closure = BTreeSet::from([seed]);
    let mut frontier = vec![seed];
    while let Some(id) = frontier.pop() {
        for g in &db.get(id).output {
            for &next in by_goal.get(&g.key()).map(Vec::as_slice).unwrap_or(&[]) {
                if closure.insert(next) {
                    frontier.push(next);
                }
            }
        }
    }
    closure
}

/// Score of each object: the larger of its own similarity and its parent's.
pub fn dependency_scores(sims: &[f64], parents: &[Option<usize>]) -> Vec<f64> {
    sims.iter()
        .zip(parents)
        .map(|(&s, p)| match p {
            Some(p) => s.max(sims[*p]),
            None => s,
        })
        .collect()
}

fn top(scores: &[f64], n: usize) -> Vec<usize> {
    let mut p: ScoredPredictions = scores.iter().copied().enumerate().collect();
    sort_predictions(&mut p);
    p.truncate(n);
    p.into_iter().map(|(id, _)| id).collect()
}

fn mask(len: usize, ids: &[usize]) -> Vec<bool> {
    let mut m = vec![false; len];
    for &i in ids {
        m[i] = true;
    }
    m
}

/// The part of the knowledge base a search may use.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PreselectedContext {
    /// Selected ids by decreasing dependency score.
    pub pairs: Vec<usize>,
    pub theorems: Vec<usize>,
    /// Selected goal-list records in id order.
    pub goal_lists: Vec<usize>,
    pub pair_mask: Vec<bool>,
    pub theorem_mask: Vec<bool>,
    pub goal_list_mask: Vec<bool>,
}

impl PreselectedContext {
    /// Selects everything.
    pub fn everything(kb: &Knowledge) -> PreselectedContext {
        let all = |n: usize| (0..n).collect::<Vec<_>>();
        PreselectedContext {
            pairs: all(kb.tactics.len()),
            theorems: all(kb.theorems.len()),
            goal_lists: all(kb.goal_lists.len()),
            pair_mask: vec![true; kb.tactics.len()],
            theorem_mask: vec![true; kb.theorems.len()],
            goal_list_mask: vec![true; kb.goal_lists.len()],
        }
    }
}

/// Keeps the `n` pairs and `n` theorems with the highest dependency score
/// for `conjecture`, and the goal-list records whose origin goal is the
/// goal of a kept pair.
pub fn preselect(conjecture: &Goal, kb: &Knowledge, n: usize) -> PreselectedContext {
    let feats = goal_features(conjecture);

    let q = kb.tactics.features().encode(&feats);
    let sims: Vec<f64> = (0..kb.tactics.len()).map(|id| kb.tactics.features().score(&q, id, SimKind::Sim1)).collect();
    let pairs = top(&dependency_scores(&sims, &pair_parents(&kb.tactics)), n);

    let q = kb.theorems.features().encode(&feats);
    let sims: Vec<f64> =
        (0..kb.theorems.len()).map(|id| kb.theorems.features().score(&q, id, SimKind::Sim1)).collect();
    let theorems = top(&dependency_scores(&sims, &theorem_parents(&kb.theorems)), n);

    let keys: HashSet<&GoalKey> = pairs.iter().map(|&id| kb.tactics.key(id)).collect();
    let goal_lists: Vec<usize> = (0..kb.goal_lists.len()).filter(|&id| keys.contains(kb.goal_lists.origin_key(id))).collect();

    PreselectedContext {
        pair_mask: mask(kb.tactics.len(), &pairs),
        theorem_mask: mask(kb.theorems.len(), &theorems),
        goal_list_mask: mask(kb.goal_lists.len(), &goal_lists),
        pairs,
        theorems,
        goal_lists,
    }
}
