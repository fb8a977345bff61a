//! Shared helpers for the integration tests: seeded generators and paths.
#![allow(dead_code)]

use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tacsearch::goalsys::{Equation, Goal, Sort, Symbol, Term};
use tacsearch::knowledge::{build_knowledge, corpus_entries, Knowledge, RecordSettings};
use tacsearch::predict::FeatureSet;
use tacsearch::search::SearchTree;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

pub fn fixture_dir(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

/// Records a script given inline; every proof must replay.
pub fn knowledge_from(script: &str, settings: &RecordSettings) -> Knowledge {
    let entries = corpus_entries(script, Path::new("inline.tac"), 0).expect("script parses");
    let (kb, reports) = build_knowledge(&entries, settings);
    for r in &reports {
        assert!(r.failure.is_none(), "{}: {:?}", r.theorem, r.failure);
    }
    kb
}

const NAT_VARS: [&str; 3] = ["x", "y", "z"];
const LIST_VARS: [&str; 2] = ["l", "k"];

/// A well-sorted random term of at most `depth` nested applications.
pub fn random_term(rng: &mut impl Rng, sort: Sort, depth: usize) -> Term {
    if depth == 0 || rng.gen_bool(0.3) {
        return match (sort, rng.gen_bool(0.7)) {
            (Sort::Nat, true) => Term::var(*NAT_VARS.choose(rng).unwrap()),
            (Sort::Nat, false) => Term::zero(),
            (Sort::List, true) => Term::var(*LIST_VARS.choose(rng).unwrap()),
            (Sort::List, false) => Term::nil(),
        };
    }
    let syms: Vec<Symbol> = Symbol::ALL
        .into_iter()
        .filter(|s| s.result_sort() == sort && s.arity() > 0)
        .collect();
    let sym = *syms.choose(rng).unwrap();
    let args = sym.arg_sorts().iter().map(|&s| random_term(rng, s, depth - 1)).collect();
    Term::app(sym, args)
}

pub fn random_equation(rng: &mut impl Rng, depth: usize) -> Equation {
    let sort = if rng.gen_bool(0.5) { Sort::Nat } else { Sort::List };
    Equation::new(random_term(rng, sort, depth), random_term(rng, sort, depth))
}

/// Up to two hypotheses and a conclusion.
pub fn random_goal(rng: &mut impl Rng) -> Goal {
    let hyps = (0..rng.gen_range(0..=2)).map(|_| random_equation(rng, 2)).collect();
    Goal::new(hyps, random_equation(rng, 3))
}

pub fn random_goal_list(rng: &mut impl Rng, max: usize) -> Vec<Goal> {
    (0..rng.gen_range(0..=max)).map(|_| random_goal(rng)).collect()
}

/// A feature set over the vocabulary `f0 .. f{vocab-1}`.
pub fn random_features(rng: &mut impl Rng, vocab: usize, max: usize) -> FeatureSet {
    (0..rng.gen_range(0..=max)).map(|_| format!("f{}", rng.gen_range(0..vocab))).collect()
}

/// `|a - b| <= tol * max(|a|, |b|)`; exact zeros compare equal.
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    a == b || (a - b).abs() <= tol * a.abs().max(b.abs())
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Recomputes every stored statistic of `tree` from the per-node data.
pub fn check_tree(tree: &SearchTree) -> Result<(), String> {
    let nodes = tree.nodes();
    let n = nodes.len();
    for (i, node) in nodes.iter().enumerate() {
        ensure(node.id == i, || format!("node {i} has id {}", node.id))?;
        match node.parent {
            None => ensure(i == SearchTree::ROOT, || format!("node {i} has no parent"))?,
            Some((p, gi)) => {
                ensure(p < i, || format!("node {i} has parent {p}: not acyclic in creation order"))?;
                let hits = nodes[p].goals[gi].applied.iter().filter(|a| a.child == i).count();
                ensure(hits == 1, || format!("node {i} listed {hits} times under its parent"))?;
            }
        }
        for (gi, slot) in node.goals.iter().enumerate() {
            for a in &slot.applied {
                ensure(nodes[a.child].parent == Some((i, gi)), || format!("child {} of {i} points elsewhere", a.child))?;
            }
        }
    }

    let mut eval: Vec<f64> = nodes.iter().map(|x| x.prior_eval).collect();
    let mut desc = vec![1usize; n];
    let mut fails: Vec<u64> = nodes.iter().map(|x| x.own_failures).collect();
    let mut child_visits = vec![0u64; n];
    for i in (1..n).rev() {
        let (p, _) = nodes[i].parent.expect("non-root");
        eval[p] += eval[i];
        desc[p] += desc[i];
        fails[p] += fails[i];
        child_visits[p] += nodes[i].visit;
    }
    for (i, node) in nodes.iter().enumerate() {
        ensure(node.descendants == desc[i], || format!("node {i}: descendants {} vs {}", node.descendants, desc[i]))?;
        ensure(node.failure == fails[i], || format!("node {i}: failure {} vs {}", node.failure, fails[i]))?;
        let want = eval[i] / (desc[i] as f64 + fails[i] as f64);
        ensure(close(node.cur_evaluation(), want, 1e-9), || {
            format!("node {i}: CurEvaluation {} vs {want}", node.cur_evaluation())
        })?;
        ensure(node.visit >= child_visits[i], || format!("node {i}: fewer visits than its children"))?;
    }

    // least fixpoint: children are created after their parents
    let mut solved = vec![false; n];
    for i in (0..n).rev() {
        let mut all = true;
        for (gi, slot) in nodes[i].goals.iter().enumerate() {
            let s = slot.applied.iter().any(|a| solved[a.child]);
            ensure(slot.solved == s, || format!("node {i} goal {gi}: solved flag {} vs {s}", slot.solved))?;
            all &= s;
        }
        solved[i] = all;
        ensure(nodes[i].solved == all, || format!("node {i}: solved flag {} vs {all}", nodes[i].solved))?;
    }
    Ok(())
}
