mod common;

use common::knowledge_from;
use tacsearch::goalsys::parse_goal;
use tacsearch::knowledge::{Knowledge, RecordSettings};
use tacsearch::predict::{
    dependency_closure_pairs, dependency_scores, pair_parents, preselect, theorem_parents, PreselectedContext,
};

fn induction_kb() -> Knowledge {
    knowledge_from(
        "theory t\n\
         theorem a : |- add(x,0) = x := Induct \"x\" THENL [Simp [], Simp []] .\n\
         theorem b : |- add(add(x,0),0) = x := Simp [a] .\n",
        &RecordSettings {
            orthogonalization: false,
            ..RecordSettings::default()
        },
    )
}

#[test]
fn a_parent_lifts_the_score_of_its_children() {
    assert_eq!(dependency_scores(&[1.0, 5.0, 0.0], &[None, None, Some(1)]), vec![1.0, 5.0, 5.0]);
    assert_eq!(dependency_scores(&[3.0, 1.0], &[None, Some(0)]), vec![3.0, 3.0]);
    assert_eq!(dependency_scores(&[3.0, 4.0], &[None, Some(0)]), vec![3.0, 4.0]);
}

#[test]
fn induction_cases_descend_from_the_induction_pair() {
    let kb = induction_kb();
    let tactics: Vec<&str> = kb.tactics.pairs().iter().map(|p| p.tactic.as_str()).collect();
    assert_eq!(tactics, ["Induct \"x\"", "Simp []", "Simp []", "Simp [t.a]"]);
    assert_eq!(pair_parents(&kb.tactics), vec![None, Some(0), Some(0), None]);
    assert_eq!(dependency_closure_pairs(&kb.tactics, 0).into_iter().collect::<Vec<_>>(), vec![0, 1, 2]);
    assert_eq!(dependency_closure_pairs(&kb.tactics, 3).into_iter().collect::<Vec<_>>(), vec![3]);
}

#[test]
fn a_used_theorem_descends_from_its_user() {
    let kb = induction_kb();
    let parents = theorem_parents(&kb.theorems);
    let id = |name: &str| kb.theorems.records().iter().position(|r| r.name == name).unwrap();
    assert_eq!(parents[id("a")], Some(id("b")));
    assert_eq!(parents[id("b")], None);
}

#[test]
fn a_large_limit_selects_everything() {
    let kb = induction_kb();
    let ctx = preselect(&parse_goal("|- add(y,0) = y").unwrap(), &kb, 500);
    let all = PreselectedContext::everything(&kb);
    assert_eq!(ctx.pair_mask, all.pair_mask);
    assert_eq!(ctx.theorem_mask, all.theorem_mask);
    assert_eq!(ctx.goal_list_mask, all.goal_list_mask);
    let mut pairs = ctx.pairs.clone();
    pairs.sort_unstable();
    assert_eq!(pairs, all.pairs);
}

#[test]
fn a_small_limit_keeps_the_best_scores_and_their_goal_lists() {
    let kb = induction_kb();
    let ctx = preselect(&parse_goal("|- add(add(y,0),0) = y").unwrap(), &kb, 1);
    assert_eq!(ctx.pairs, vec![3]);
    assert_eq!(ctx.theorems.len(), 1);
    assert_eq!(ctx.pair_mask.iter().filter(|&&m| m).count(), 1);
    for (id, rec) in kb.goal_lists.records().iter().enumerate() {
        let kept = rec.origin_goal.key() == kb.tactics.get(3).goal.key();
        assert_eq!(ctx.goal_list_mask[id], kept);
    }
    let none = preselect(&parse_goal("|- x = x").unwrap(), &kb, 0);
    assert!(none.pairs.is_empty() && none.theorems.is_empty() && none.goal_lists.is_empty());
}
