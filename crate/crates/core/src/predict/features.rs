use std::collections::{BTreeMap, BTreeSet};

use crate::goalsys::{Goal, Sort, Term};

/// A deduplicated, ordered set of feature strings.
pub type FeatureSet = BTreeSet<String>;

/// Features of a term. Kinds are prefixed so a symbol name, a masked
/// subterm and a variable name never collide:
/// `c:` symbol names, `s:` subterms with variables masked to `V`,
/// `v:` variable names, `ty:` sorts of symbol and variable occurrences.
pub fn term_features(t: &Term) -> FeatureSet {
    let mut sorts = BTreeMap::new();
    t.collect_var_sorts(&mut sorts);
    let mut out = FeatureSet::new();
    term_features_into(t, &sorts, "", &mut out);
    out
}

fn term_features_into(t: &Term, sorts: &BTreeMap<String, Sort>, tag: &str, out: &mut FeatureSet) {
    t.for_each_subterm(&mut |s| {
        out.insert(format!("{tag}s:{}", s.masked()));
        let sort = match s {
            Term::Var(x) => {
                out.insert(format!("{tag}v:{x}"));
                sorts.get(x).copied().unwrap_or(Sort::Nat)
            }
            Term::App(sym, _) => {
                out.insert(format!("{tag}c:{}", sym.name()));
                sym.result_sort()
            }
        };
        out.insert(format!("{tag}ty:{}", sort.name()));
    });
}

/// Hypothesis features tagged `asm:`, conclusion features tagged `concl:`.
/// Variable sorts are inferred from the whole goal.
pub fn goal_features(g: &Goal) -> FeatureSet {
    let sorts = g.var_sorts();
    let mut out = FeatureSet::new();
    for h in &g.hyps {
        term_features_into(&h.lhs, &sorts, "asm:", &mut out);
        term_features_into(&h.rhs, &sorts, "asm:", &mut out);
    }
    term_features_into(&g.concl.lhs, &sorts, "concl:", &mut out);
    term_features_into(&g.concl.rhs, &sorts, "concl:", &mut out);
    out
}

/// Plain union of the member goals' features.
pub fn goal_list_features(goals: &[Goal]) -> FeatureSet {
    goals.iter().flat_map(goal_features).collect()
}
