//! Turning a solved search tree into a short, readable, replayable script.

use std::time::{Duration, Instant};

use serde::Serialize;

use crate::goalsys::{goal_lists_equiv, Goal, Interpreter, TacUnit, Tactic, ThmList, ThmRef, TheoremEnv};
use crate::search::{NodeId, SearchTree};

/// Budget of each unit application while checking effects.
pub const UNIT_CHECK_TIMEOUT: Duration = Duration::from_millis(500);
/// Budget of a whole-script replay.
pub const REPLAY_TIMEOUT: Duration = Duration::from_secs(10);

/// A tactic proof as text plus its combinator structure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProofScript {
    pub text: String,
    #[serde(skip)]
    pub structure: Tactic,
}

impl ProofScript {
    pub fn new(structure: Tactic) -> ProofScript {
        ProofScript {
            text: structure.to_string(),
            structure,
        }
    }

    pub fn unit_count(&self) -> usize {
        self.structure.unit_count()
    }

    pub fn replays(&self, conjecture: &Goal, env: &TheoremEnv) -> bool {
        Interpreter::new(env).replay(&self.structure, conjecture, REPLAY_TIMEOUT)
    }
}

impl std::fmt::Display for ProofScript {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.text)
    }
}

/// Extracts the proof below the solved root: each solved goal contributes
/// its first solving tactic followed by the proofs of that child's goals.
/// Singleton continuations use `THEN`; closing tactics stand alone.
pub fn extract_proof(tree: &SearchTree) -> ProofScript {
    assert!(tree.is_proved(), "extraction needs a solved root");
    ProofScript::new(proof_of_goal(tree, SearchTree::ROOT, 0))
}

fn proof_of_goal(tree: &SearchTree, node: NodeId, goal: usize) -> Tactic {
    let solving = tree.node(node).goals[goal]
        .applied
        .iter()
        .find(|a| tree.node(a.child).solved)
        .expect("solved goal has a solved child");
    let head = solving.code.tactic();
    let mut rest = proof_of_node(tree, solving.child);
    match rest.len() {
        0 => head,
        1 => Tactic::then(head, rest.pop().unwrap()),
        _ => Tactic::then_list(head, rest),
    }
}

fn proof_of_node(tree: &SearchTree, node: NodeId) -> Vec<Tactic> {
    (0..tree.node(node).goals.len()).map(|gi| proof_of_goal(tree, node, gi)).collect()
}

/// Applies `t` to each goal and concatenates the outputs; `None` if any
/// application fails.
fn effect(interp: &Interpreter, t: &Tactic, goals: &[Goal]) -> Option<Vec<Goal>> {
    let mut out = Vec::new();
    for g in goals {
        out.extend(interp.apply(t, g, UNIT_CHECK_TIMEOUT).goals()?.iter().cloned());
    }
    Some(out)
}

/// Outputs of `t` on each goal separately.
fn effects(interp: &Interpreter, t: &Tactic, goals: &[Goal]) -> Option<Vec<Vec<Goal>>> {
    goals.iter().map(|g| interp.apply(t, g, UNIT_CHECK_TIMEOUT).goals().map(<[Goal]>::to_vec)).collect()
}

fn same_effect(a: &Option<Vec<Goal>>, b: &Option<Vec<Goal>>) -> bool {
    match (a, b) {
        (Some(a), Some(b)) => goal_lists_equiv(a, b),
        _ => false,
    }
}

/// Rebuilds `t` unit by unit; `f` sees each unit with the goals it is
/// applied to at its position.
fn map_units_in_context(
    interp: &Interpreter,
    t: &Tactic,
    goals: &[Goal],
    f: &mut impl FnMut(&TacUnit, &[Goal]) -> TacUnit,
) -> Tactic {
    match t {
        Tactic::Unit(u) => Tactic::Unit(f(u, goals)),
        Tactic::Then(a, b) => {
            let a2 = map_units_in_context(interp, a, goals, f);
            match effect(interp, &a2, goals) {
                Some(outs) => {
                    let b2 = map_units_in_context(interp, b, &outs, f);
                    Tactic::then(a2, b2)
                }
                None => Tactic::then(a2, (**b).clone()),
            }
        }
        Tactic::ThenL(a, bs) => {
            let a2 = map_units_in_context(interp, a, goals, f);
            let Some(per_goal) = effects(interp, &a2, goals) else {
                return Tactic::then_list(a2, bs.clone());
            };
            let bs2 = bs
                .iter()
                .enumerate()
                .map(|(i, b)| {
                    let ith: Vec<Goal> = per_goal.iter().filter_map(|o| o.get(i).cloned()).collect();
                    map_units_in_context(interp, b, &ith, f)
                })
                .collect();
            Tactic::then_list(a2, bs2)
        }
    }
}

fn shorten(interp: &Interpreter, t: &Tactic, goals: &[Goal]) -> Tactic {
    match t {
        Tactic::Unit(_) => t.clone(),
        Tactic::Then(a, b) => {
            let a2 = shorten(interp, a, goals);
            let Some(outs) = effect(interp, &a2, goals) else {
                return Tactic::then(a2, (**b).clone());
            };
            let b2 = shorten(interp, b, &outs);
            let joint = Tactic::then(a2, b2.clone());
            if same_effect(&effect(interp, &b2, goals), &effect(interp, &joint, goals)) {
                b2
            } else {
                joint
            }
        }
        Tactic::ThenL(a, bs) => {
            let a2 = shorten(interp, a, goals);
            let Some(per_goal) = effects(interp, &a2, goals) else {
                return Tactic::then_list(a2, bs.clone());
            };
            let bs2 = bs
                .iter()
                .enumerate()
                .map(|(i, b)| {
                    let ith: Vec<Goal> = per_goal.iter().filter_map(|o| o.get(i).cloned()).collect();
                    shorten(interp, b, &ith)
                })
                .collect();
            Tactic::then_list(a2, bs2)
        }
    }
}

/// Replaces `A THEN B` by `B` wherever `B` alone has the same effect at
/// that position, until nothing changes. Falls back to the input if the
/// result does not replay.
pub fn minimize_length(script: &ProofScript, conjecture: &Goal, env: &TheoremEnv) -> ProofScript {
    let interp = Interpreter::new(env);
    let mut cur = script.structure.clone();
    loop {
        let next = shorten(&interp, &cur, std::slice::from_ref(conjecture));
        if next == cur {
            break;
        }
        cur = next;
    }
    let out = ProofScript::new(cur);
    if out.replays(conjecture, env) {
        out
    } else {
        script.clone()
    }
}

fn with_refs(u: &TacUnit, refs: Vec<ThmRef>) -> TacUnit {
    let mut u = u.clone();
    if let Some(l) = u.thm_list_mut() {
        *l = ThmList::Lit(refs);
    }
    u
}

fn unit_effect(interp: &Interpreter, u: &TacUnit, goals: &[Goal]) -> Option<Vec<Goal>> {
    effect(interp, &Tactic::Unit(u.clone()), goals)
}

/// Drops theorem-list elements left to right whenever the unit keeps its
/// effect without them. Passes repeat until no element can be dropped.
pub fn minimize_args(script: &ProofScript, conjecture: &Goal, env: &TheoremEnv) -> ProofScript {
    let interp = Interpreter::new(env);
    let mut cur = script.structure.clone();
    loop {
        let next = map_units_in_context(&interp, &cur, std::slice::from_ref(conjecture), &mut |u, goals| {
            let Some(ThmList::Lit(refs)) = u.thm_list() else {
                return u.clone();
            };
            let target = unit_effect(&interp, u, goals);
            if target.is_none() {
                return u.clone();
            }
            let mut keep = refs.clone();
            let mut i = 0;
            while i < keep.len() {
                let mut fewer = keep.clone();
                fewer.remove(i);
                if same_effect(&unit_effect(&interp, &with_refs(u, fewer.clone()), goals), &target) {
                    keep = fewer;
                } else {
                    i += 1;
                }
            }
            with_refs(u, keep)
        });
        if next == cur {
            break;
        }
        cur = next;
    }
    let out = ProofScript::new(cur);
    if out.replays(conjecture, env) {
        out
    } else {
        script.clone()
    }
}

/// Drops theory qualifiers that are unambiguous in `env`, unit by unit,
/// keeping a unit's original form if the shorter one changes its effect.
pub fn embellish(script: &ProofScript, conjecture: &Goal, env: &TheoremEnv) -> ProofScript {
    let interp = Interpreter::new(env);
    let pretty = map_units_in_context(&interp, &script.structure, std::slice::from_ref(conjecture), &mut |u, goals| {
        let Some(ThmList::Lit(refs)) = u.thm_list() else {
            return u.clone();
        };
        let short: Vec<ThmRef> = refs
            .iter()
            .map(|r| if r.theory.is_some() && env.unambiguous(r) { ThmRef::bare(r.name.clone()) } else { r.clone() })
            .collect();
        if short == *refs {
            return u.clone();
        }
        let candidate = with_refs(u, short);
        if same_effect(&unit_effect(&interp, &candidate, goals), &unit_effect(&interp, u, goals)) {
            candidate
        } else {
            u.clone()
        }
    });
    let out = ProofScript::new(pretty);
    if out.replays(conjecture, env) {
        out
    } else {
        script.clone()
    }
}

/// The stages of a found proof.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FinishedProof {
    pub extracted: ProofScript,
    pub minimized: ProofScript,
    /// Final, embellished script.
    pub script: ProofScript,
}

/// Extraction followed by length and argument minimization and
/// embellishment.
pub fn finish_proof(tree: &SearchTree, conjecture: &Goal, env: &TheoremEnv) -> FinishedProof {
    let extracted = extract_proof(tree);
    let short = minimize_length(&extracted, conjecture, env);
    let minimized = minimize_args(&short, conjecture, env);
    let script = embellish(&minimized, conjecture, env);
    FinishedProof {
        extracted,
        minimized,
        script,
    }
}

/// Machine-readable companion of an emitted script.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct ProofSidecar {
    pub theorem: String,
    pub script: String,
    pub unit_count: usize,
    pub replay_ms: u64,
}

pub fn sidecar(theorem: &str, script: &ProofScript, conjecture: &Goal, env: &TheoremEnv) -> ProofSidecar {
    let start = Instant::now();
    let ok = script.replays(conjecture, env);
    debug_assert!(ok, "emitted scripts replay");
    ProofSidecar {
        theorem: theorem.to_string(),
        script: script.text.clone(),
        unit_count: script.unit_count(),
        replay_ms: start.elapsed().as_millis() as u64,
    }
}
