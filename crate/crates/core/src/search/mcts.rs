use std::collections::{BTreeMap, HashMap, HashSet};
use std::rc::Rc;
use std::time::{Duration, Instant};

use serde::Serialize;

use super::config::SearchConfig;
use super::policy::{evaluation_ratio, node_value, prior_policy, widening_policy};
use super::tree::{NodeId, SearchTree};
use crate::goalsys::{
    goal_list_subsumed, Goal, Interpreter, TacUnit, Tactic, TacticCode, TacticOutcome, ThmList, ThmRef, TheoremEnv,
};
use crate::knowledge::{instantiate_with, GoalListDb, Knowledge, Label};
use crate::predict::{goal_features, goal_list_features, preselect, PreselectedContext};
use crate::proofout::{finish_proof, FinishedProof};

/// Fraction of positive records among the `k` goal lists nearest to
/// `goals` that `keep` admits. Divides by `k` even when fewer records exist.
pub fn prior_evaluation(goals: &[Goal], db: &GoalListDb, k: usize, keep: impl Fn(usize) -> bool) -> f64 {
    if db.is_empty() {
        return 0.0;
    }
    let q = db.features().encode(&goal_list_features(goals));
    let positives = db
        .predict(&q, k, keep)
        .into_iter()
        .filter(|&(id, _)| db.get(id).label == Label::Positive)
        .count();
    evaluation_ratio(positives, k)
}

/// Widening weight of a goal with `n` children; constant without a
/// learned policy.
pub fn widening_for(config: &SearchConfig, n: usize) -> f64 {
    if config.learned_policy {
        widening_policy(config.c_policy, n)
    } else {
        config.c_policy
    }
}

/// Selection value of `child` under `parent`.
pub fn child_value(tree: &SearchTree, child: NodeId, parent: NodeId, config: &SearchConfig) -> f64 {
    let c = tree.node(child);
    let p = tree.node(parent);
    node_value(c.cur_evaluation(), c.prior_policy, c.visit, p.visit, config.c_exploration)
}

/// Descends from the root through the best child of each open goal until
/// a childless node, or until widening is worth at least the best child.
/// Returns the traversed path; value ties go to the lower rank.
pub fn select_node(tree: &SearchTree, config: &SearchConfig) -> Vec<NodeId> {
    let mut cur = SearchTree::ROOT;
    let mut path = vec![cur];
    loop {
        let node = tree.node(cur);
        let Some(gi) = node.open_goal() else { break };
        let applied = &node.goals[gi].applied;
        if applied.is_empty() {
            break;
        }
        let mut best = applied[0].child;
        let mut best_value = child_value(tree, best, cur, config);
        for a in &applied[1..] {
            let v = child_value(tree, a.child, cur, config);
            if v > best_value {
                best = a.child;
                best_value = v;
            }
        }
        if widening_for(config, applied.len()) >= best_value {
            break;
        }
        cur = best;
        path.push(cur);
    }
    path
}

/// A tactic to try on a goal together with its time budget.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Candidate {
    pub code: TacticCode,
    pub timeout: Duration,
}

/// Why an extension step did not add a node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtensionFailure {
    UnderSolved,
    NoTactic,
    Failed,
    TimedOut,
    Loop,
    Redundant,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Extension {
    Extended(NodeId),
    Failure(ExtensionFailure),
}

/// Per-search counters, exported with every status.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SearchStats {
    pub steps: usize,
    pub nodes: usize,
    pub cache_hits: usize,
    pub cache_misses: usize,
    pub failures: BTreeMap<String, usize>,
    pub max_depth: usize,
    /// Time until the search ended, proof post-processing excluded.
    pub wall_ms: u64,
    /// Time spent extracting, minimizing and embellishing the proof.
    pub finish_ms: u64,
    /// Highest corpus index among the theorems whose pairs supplied a
    /// candidate tactic; `None` when no recorded pair was used.
    pub latest_pair_theorem: Option<usize>,
    /// Highest theorem-database id used as a premise or instantiation.
    pub latest_theorem_id: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SearchOutcome {
    Proved(FinishedProof),
    Saturated,
    TimedOut,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchStatus {
    pub outcome: SearchOutcome,
    pub stats: SearchStats,
}

impl SearchStatus {
    pub fn is_proved(&self) -> bool {
        matches!(self.outcome, SearchOutcome::Proved(_))
    }

    pub fn proof(&self) -> Option<&FinishedProof> {
        match &self.outcome {
            SearchOutcome::Proved(p) => Some(p),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self.outcome {
            SearchOutcome::Proved(_) => "proved",
            SearchOutcome::Saturated => "saturated",
            SearchOutcome::TimedOut => "timeout",
        }
    }
}

struct Queue {
    list: Rc<Vec<Candidate>>,
    next: usize,
}

/// One proof search: the tree plus everything needed to grow it.
pub struct Search<'a> {
    kb: &'a Knowledge,
    env: TheoremEnv,
    ctx: PreselectedContext,
    config: SearchConfig,
    conjecture: Goal,
    tree: SearchTree,
    ranked: HashMap<Goal, Rc<Vec<Candidate>>>,
    queues: HashMap<(NodeId, usize), Queue>,
    cache: HashMap<(Goal, TacticCode), TacticOutcome>,
    stats: SearchStats,
    start: Instant,
}

impl<'a> Search<'a> {
    /// Preselects the knowledge relevant to `conjecture` and creates the
    /// root. Names resolve in `theory`.
    pub fn new(conjecture: &Goal, kb: &'a Knowledge, theory: &str, config: &SearchConfig) -> Search<'a> {
        let start = Instant::now();
        let ctx = preselect(conjecture, kb, config.preselect_n);
        let mut s = Search {
            kb,
            env: kb.env_for(theory),
            ctx,
            config: config.clone(),
            conjecture: conjecture.clone(),
            tree: SearchTree::new(conjecture.clone(), 0.0),
            ranked: HashMap::new(),
            queues: HashMap::new(),
            cache: HashMap::new(),
            stats: SearchStats::default(),
            start,
        };
        let root_eval = s.evaluate(std::slice::from_ref(conjecture));
        s.tree = SearchTree::new(conjecture.clone(), root_eval);
        s.stats.nodes = 1;
        s
    }

    pub fn tree(&self) -> &SearchTree {
        &self.tree
    }

    pub fn context(&self) -> &PreselectedContext {
        &self.ctx
    }

    pub fn config(&self) -> &SearchConfig {
        &self.config
    }

    pub fn stats(&self) -> &SearchStats {
        &self.stats
    }

    pub fn env(&self) -> &TheoremEnv {
        &self.env
    }

    /// Prior evaluation of a node holding `goals`; a closed list is worth 1.
    fn evaluate(&self, goals: &[Goal]) -> f64 {
        if !self.config.evaluation {
            return 0.0;
        }
        if goals.is_empty() {
            return 1.0;
        }
        let mask = &self.ctx.goal_list_mask;
        prior_evaluation(goals, &self.kb.goal_lists, self.config.eval_radius, |id| mask[id])
    }

    fn prior_for_rank(&self, rank: usize) -> f64 {
        if self.config.learned_policy {
            prior_policy(self.config.c_policy, rank)
        } else {
            self.config.c_policy
        }
    }

    pub fn select(&self) -> Vec<NodeId> {
        select_node(&self.tree, &self.config)
    }

    /// Theorems to use as premises or placeholder fillers on `g`.
    fn premises(&mut self, g: &Goal, n: usize) -> Vec<ThmRef> {
        let ids: Vec<usize> = if self.config.learned_policy {
            let q = self.kb.theorems.features().encode(&goal_features(g));
            let mask = &self.ctx.theorem_mask;
            self.kb.theorems.predict(&q, n, |id| mask[id]).into_iter().map(|(id, _)| id).collect()
        } else {
            let mut ids = self.ctx.theorems.clone();
            ids.sort_unstable_by(|a, b| b.cmp(a));
            ids.truncate(n);
            ids
        };
        if let Some(&m) = ids.iter().max() {
            self.stats.latest_theorem_id = self.stats.latest_theorem_id.max(Some(m));
        }
        ids.into_iter().map(|id| self.kb.theorems.get(id).reference()).collect()
    }

    /// Every candidate tactic for `g` in trial order, without duplicates.
    fn rank_candidates(&mut self, g: &Goal) -> Vec<Candidate> {
        let radius = self.config.auto_premises.max(self.config.abs_radius);
        let thms = self.premises(g, radius);
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        if self.config.auto_priority {
            let n = self.config.auto_premises.min(thms.len());
            let code = Tactic::unit(TacUnit::Auto(ThmList::Lit(thms[..n].to_vec()))).code();
            seen.insert(code.clone());
            out.push(Candidate {
                code,
                timeout: self.config.auto_timeout,
            });
        }
        let pairs: Vec<usize> = if self.config.learned_policy {
            let q = self.kb.tactics.features().encode(&goal_features(g));
            let mask = &self.ctx.pair_mask;
            self.kb.tactics.predict(&q, self.ctx.pairs.len(), |id| mask[id]).into_iter().map(|(id, _)| id).collect()
        } else {
            let mut ids = self.ctx.pairs.clone();
            ids.sort_unstable();
            ids
        };
        let fill = &thms[..self.config.abs_radius.min(thms.len())];
        for id in pairs {
            let pair = self.kb.tactics.get(id);
            let stored = pair.tactic.tactic();
            let code = if !stored.has_hole() {
                pair.tactic.clone()
            } else if self.config.abstraction {
                instantiate_with(&stored, fill).code()
            } else {
                pair.applied.clone()
            };
            if seen.insert(code.clone()) {
                self.stats.latest_pair_theorem = self.stats.latest_pair_theorem.max(Some(pair.theorem));
                out.push(Candidate {
                    code,
                    timeout: self.config.tactic_timeout,
                });
            }
        }
        out
    }

    fn next_candidate(&mut self, id: NodeId, gi: usize) -> Option<Candidate> {
        if !self.queues.contains_key(&(id, gi)) {
            let g = self.tree.node(id).goals[gi].goal.clone();
            let list = match self.ranked.get(&g) {
                Some(l) => l.clone(),
                None => {
                    let l = Rc::new(self.rank_candidates(&g));
                    self.ranked.insert(g, l.clone());
                    l
                }
            };
            self.queues.insert((id, gi), Queue { list, next: 0 });
        }
        let q = self.queues.get_mut(&(id, gi)).expect("queue just inserted");
        let c = q.list.get(q.next).cloned();
        q.next += 1;
        if q.next >= q.list.len() {
            self.tree.mark_exhausted(id);
        }
        c
    }

    /// Applies `c` to `g` through the tactic cache.
    pub fn apply_cached(&mut self, g: &Goal, c: &Candidate) -> TacticOutcome {
        let key = (g.clone(), c.code.clone());
        if let Some(o) = self.cache.get(&key) {
            self.stats.cache_hits += 1;
            return o.clone();
        }
        self.stats.cache_misses += 1;
        let out = Interpreter::new(&self.env).apply_code(&c.code, g, c.timeout);
        self.cache.insert(key, out.clone());
        out
    }

    /// Tries the next untested tactic on the open goal of `id`.
    pub fn extend(&mut self, id: NodeId) -> Extension {
        if self.tree.under_solved(id) {
            return Extension::Failure(ExtensionFailure::UnderSolved);
        }
        let gi = self.tree.node(id).open_goal().expect("unsolved node has an open goal");
        let Some(cand) = self.next_candidate(id, gi) else {
            return Extension::Failure(ExtensionFailure::NoTactic);
        };
        let g = self.tree.node(id).goals[gi].goal.clone();
        let output = match self.apply_cached(&g, &cand) {
            TacticOutcome::Success(goals) => goals,
            TacticOutcome::Failure(_) => return Extension::Failure(ExtensionFailure::Failed),
            TacticOutcome::Timeout => return Extension::Failure(ExtensionFailure::TimedOut),
        };
        let seen = self.tree.ancestor_goal_keys(id);
        if output.iter().any(|o| seen.contains(&o.key())) {
            return Extension::Failure(ExtensionFailure::Loop);
        }
        let node = self.tree.node(id);
        let redundant = node.goals[gi]
            .applied
            .iter()
            .any(|a| goal_list_subsumed(&self.tree.node(a.child).goal_list(), &output));
        if redundant {
            return Extension::Failure(ExtensionFailure::Redundant);
        }
        let rank = node.goals[gi].applied.len();
        let prior = self.prior_for_rank(rank);
        let eval = self.evaluate(&output);
        let child = self.tree.add_child(id, gi, cand.code, output, eval, prior);
        Extension::Extended(child)
    }

    /// One selection, extension and backpropagation.
    pub fn step(&mut self) -> Extension {
        let path = self.select();
        let target = *path.last().expect("path starts at the root");
        let ext = self.extend(target);
        match ext {
            Extension::Extended(child) => {
                self.tree.backpropagate(&path, Some(child));
                self.stats.nodes += 1;
                self.stats.max_depth = self.stats.max_depth.max(self.tree.node(child).depth);
            }
            Extension::Failure(why) => {
                self.tree.backpropagate(&path, None);
                let key = serde_json::to_value(why).ok().and_then(|v| v.as_str().map(str::to_string));
                *self.stats.failures.entry(key.unwrap_or_default()).or_default() += 1;
            }
        }
        self.stats.steps += 1;
        ext
    }

    fn out_of_budget(&self) -> bool {
        self.start.elapsed() >= self.config.global_timeout
            || self.config.max_steps.is_some_and(|m| self.stats.steps >= m)
    }

    /// Steps until the root is solved, nothing is left to try, or the
    /// budget runs out. Found proofs are extracted and minimized.
    pub fn run(mut self) -> SearchStatus {
        let outcome = loop {
            if self.tree.is_proved() {
                self.stats.wall_ms = self.start.elapsed().as_millis() as u64;
                let t = Instant::now();
                let proof = finish_proof(&self.tree, &self.conjecture, &self.env);
                self.stats.finish_ms = t.elapsed().as_millis() as u64;
                break SearchOutcome::Proved(proof);
            }
            if self.tree.is_saturated() {
                break SearchOutcome::Saturated;
            }
            if self.out_of_budget() {
                break SearchOutcome::TimedOut;
            }
            self.step();
        };
        if !matches!(outcome, SearchOutcome::Proved(_)) {
            self.stats.wall_ms = self.start.elapsed().as_millis() as u64;
        }
        SearchStatus {
            outcome,
            stats: self.stats,
        }
    }
}

/// Searches for a proof of `conjecture` with the names of `theory` in
/// scope.
pub fn search_in(conjecture: &Goal, kb: &Knowledge, theory: &str, config: &SearchConfig) -> SearchStatus {
    let start = Instant::now();
    let mut status = Search::new(conjecture, kb, theory, config).run();
    if config.research_minimization {
        if let SearchOutcome::Proved(found) = &status.outcome {
            let remaining = config.global_timeout.saturating_sub(start.elapsed());
            let retry = SearchConfig {
                c_policy: RESEARCH_C_POLICY,
                global_timeout: remaining,
                research_minimization: false,
                ..config.clone()
            };
            let again = Search::new(conjecture, kb, theory, &retry).run();
            if let SearchOutcome::Proved(shorter) = &again.outcome {
                if shorter.script.unit_count() < found.script.unit_count() {
                    status.outcome = again.outcome;
                }
            }
            status.stats.finish_ms += again.stats.wall_ms + again.stats.finish_ms;
        }
    }
    status
}

/// Prior-policy coefficient of the re-search minimization: a flat prior
/// favours short, broad proofs.
pub const RESEARCH_C_POLICY: f64 = 0.1;

/// [`search_in`] within the knowledge base's current theory.
pub fn search(conjecture: &Goal, kb: &Knowledge, config: &SearchConfig) -> SearchStatus {
    search_in(conjecture, kb, kb.env.current_theory(), config)
}
