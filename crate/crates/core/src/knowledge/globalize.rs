use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::goalsys::{TacUnit, Tactic, TacticCode, ThmList, ThmRef, TheoremEnv};

/// A proof made independent of its script: aliases inlined and theorem
/// references qualified. References that could not be resolved stay as
/// written and are listed in `unresolved`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Globalized {
    pub tactic: Tactic,
    pub unresolved: Vec<ThmRef>,
    pub unknown_aliases: Vec<String>,
}

impl Globalized {
    pub fn is_clean(&self) -> bool {
        self.unresolved.is_empty() && self.unknown_aliases.is_empty()
    }
}

/// Replaces alias leaves by their definitions, recursively. A cyclic or
/// undefined alias is left in place and reported.
pub fn inline_aliases(t: &Tactic, aliases: &BTreeMap<String, Tactic>) -> (Tactic, Vec<String>) {
    let mut unknown = Vec::new();
    let out = inline_rec(t, aliases, &mut Vec::new(), &mut unknown);
    (out, unknown)
}

fn inline_rec(
    t: &Tactic,
    aliases: &BTreeMap<String, Tactic>,
    stack: &mut Vec<String>,
    unknown: &mut Vec<String>,
) -> Tactic {
    t.map_units(&mut |u| match u {
        TacUnit::Alias(a) => match aliases.get(a) {
            Some(body) if !stack.contains(a) => {
                stack.push(a.clone());
                let out = inline_rec(body, aliases, stack, unknown);
                stack.pop();
                out
            }
            _ => {
                if !unknown.contains(a) {
                    unknown.push(a.clone());
                }
                Tactic::Unit(u.clone())
            }
        },
        other => Tactic::Unit(other.clone()),
    })
}

/// Qualifies every theorem reference against `env`.
pub fn qualify_refs(t: &Tactic, env: &TheoremEnv) -> (Tactic, Vec<ThmRef>) {
    let mut unresolved = Vec::new();
    let out = t.map_units(&mut |u| {
        let mut u = u.clone();
        if let Some(ThmList::Lit(refs)) = u.thm_list_mut() {
            for r in refs.iter_mut() {
                match env.qualify(r) {
                    Some(q) => *r = q,
                    None => {
                        log::warn!("cannot globalize theorem reference `{r}`");
                        unresolved.push(r.clone());
                    }
                }
            }
        }
        Tactic::Unit(u)
    });
    (out, unresolved)
}

pub fn globalize(t: &Tactic, aliases: &BTreeMap<String, Tactic>, env: &TheoremEnv) -> Globalized {
    let (inlined, unknown_aliases) = inline_aliases(t, aliases);
    let (tactic, unresolved) = qualify_refs(&inlined, env);
    Globalized {
        tactic,
        unresolved,
        unknown_aliases,
    }
}

/// Tactic units of a proof in execution order. The combinator skeleton is
/// the proof tree itself; parenthesized compounds are split as well.
pub fn split_tactic_units(t: &Tactic) -> Vec<TacticCode> {
    t.units().into_iter().map(|u| Tactic::Unit(u.clone()).code()).collect()
}

/// A tactic whose theorem-list arguments are all replaced by `□`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbstractedTactic {
    pub code: TacticCode,
    pub origin: TacticCode,
}

impl AbstractedTactic {
    /// The argument lists of the origin, in leaf order.
    pub fn origin_lists(&self) -> Vec<ThmList> {
        self.origin
            .tactic()
            .units()
            .into_iter()
            .filter_map(|u| u.thm_list().cloned())
            .collect()
    }
}

/// `None` when `t` has no literal theorem list.
pub fn abstract_tactic(t: &TacticCode) -> Option<AbstractedTactic> {
    let tac = t.tactic();
    let has_lit = tac.units().iter().any(|u| matches!(u.thm_list(), Some(ThmList::Lit(_))));
    if !has_lit {
        return None;
    }
    let abs = tac.map_units(&mut |u| {
        let mut u = u.clone();
        if let Some(l) = u.thm_list_mut() {
            *l = ThmList::Hole;
        }
        Tactic::Unit(u)
    });
    Some(AbstractedTactic {
        code: abs.code(),
        origin: t.clone(),
    })
}

/// Fills the placeholders left to right with `lists`; surplus placeholders
/// stay unfilled.
pub fn fill_holes(t: &Tactic, lists: &[ThmList]) -> Tactic {
    let mut it = lists.iter();
    t.map_units(&mut |u| {
        let mut u = u.clone();
        if let Some(l) = u.thm_list_mut() {
            if *l == ThmList::Hole {
                if let Some(fill) = it.next() {
                    *l = fill.clone();
                }
            }
        }
        Tactic::Unit(u)
    })
}

/// Replaces every placeholder with the same theorem list.
pub fn instantiate_with(t: &Tactic, refs: &[ThmRef]) -> Tactic {
    t.map_units(&mut |u| {
        let mut u = u.clone();
        if let Some(l) = u.thm_list_mut() {
            if *l == ThmList::Hole {
                *l = ThmList::Lit(refs.to_vec());
            }
        }
        Tactic::Unit(u)
    })
}
