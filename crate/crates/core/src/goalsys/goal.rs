use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::parse::parse_goal;
use super::term::{Equation, Sort, Term};

/// A sequent: ordered hypotheses and a conclusion, all variables universally
/// quantified at goal level. Serializes as its printed form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Goal {
    pub hyps: Vec<Equation>,
    pub concl: Equation,
}

/// Alpha-normal printed form of a goal, used as a map key.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GoalKey(pub String);

impl Goal {
    pub fn new(hyps: Vec<Equation>, concl: Equation) -> Goal {
        Goal { hyps, concl }
    }

    pub fn trivial(concl: Equation) -> Goal {
        Goal::new(Vec::new(), concl)
    }

    /// Variables in order of first occurrence, hypotheses first.
    pub fn vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        for h in &self.hyps {
            h.vars_into(&mut out);
        }
        self.concl.vars_into(&mut out);
        out
    }

    pub fn contains_var(&self, v: &str) -> bool {
        self.concl.contains_var(v) || self.hyps.iter().any(|h| h.contains_var(v))
    }

    pub fn hyps_contain_var(&self, v: &str) -> bool {
        self.hyps.iter().any(|h| h.contains_var(v))
    }

    pub fn subst1(&self, v: &str, by: &Term) -> Goal {
        Goal::new(
            self.hyps.iter().map(|h| h.subst1(v, by)).collect(),
            self.concl.subst1(v, by),
        )
    }

    /// Renames variables to `v0, v1, ...` by first occurrence. Two goals are
    /// alpha-equivalent exactly when their canonical forms coincide.
    pub fn canonical(&self) -> Goal {
        let map: BTreeMap<String, String> = self
            .vars()
            .into_iter()
            .enumerate()
            .map(|(i, v)| (v, format!("v{i}")))
            .collect();
        Goal::new(
            self.hyps.iter().map(|h| h.rename(&map)).collect(),
            self.concl.rename(&map),
        )
    }

    pub fn key(&self) -> GoalKey {
        GoalKey(self.canonical().to_string())
    }

    /// Infers a sort for every variable. Argument positions decide first;
    /// a variable standing alone on one side of an equation takes the sort
    /// of the other side; anything left over defaults to `nat`.
    pub fn var_sorts(&self) -> BTreeMap<String, Sort> {
        let eqs: Vec<&Equation> = self.hyps.iter().chain(std::iter::once(&self.concl)).collect();
        let mut sorts = BTreeMap::new();
        for eq in &eqs {
            eq.lhs.collect_var_sorts(&mut sorts);
            eq.rhs.collect_var_sorts(&mut sorts);
        }
        // Two rounds settle chains like `x = y, y = nil`.
        for _ in 0..2 {
            for eq in &eqs {
                let side_sort = |t: &Term, sorts: &BTreeMap<String, Sort>| match t {
                    Term::Var(x) => sorts.get(x).copied(),
                    _ => t.head_sort(),
                };
                let known = side_sort(&eq.lhs, &sorts).or_else(|| side_sort(&eq.rhs, &sorts));
                if let Some(s) = known {
                    for side in [&eq.lhs, &eq.rhs] {
                        if let Term::Var(x) = side {
                            sorts.entry(x.clone()).or_insert(s);
                        }
                    }
                }
            }
        }
        for v in self.vars() {
            sorts.entry(v).or_insert(Sort::Nat);
        }
        sorts
    }
}

impl fmt::Display for Goal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, h) in self.hyps.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{h}")?;
        }
        if !self.hyps.is_empty() {
            f.write_str(" ")?;
        }
        write!(f, "|- {}", self.concl)
    }
}

impl Serialize for Goal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Goal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Goal, D::Error> {
        let text = String::deserialize(d)?;
        parse_goal(&text).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for GoalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// True iff a variable bijection maps `a` onto `b`; hypotheses compare
/// positionally.
pub fn alpha_equiv(a: &Goal, b: &Goal) -> bool {
    a.hyps.len() == b.hyps.len() && a.canonical() == b.canonical()
}

/// `l1 <= l2`: every goal of `l1` is alpha-equivalent to some goal of `l2`.
pub fn goal_list_subsumed(l1: &[Goal], l2: &[Goal]) -> bool {
    let keys: Vec<GoalKey> = l2.iter().map(Goal::key).collect();
    l1.iter().all(|g| keys.contains(&g.key()))
}

/// Positionwise alpha-equivalence of two goal lists.
pub fn goal_lists_equiv(l1: &[Goal], l2: &[Goal]) -> bool {
    l1.len() == l2.len() && l1.iter().zip(l2).all(|(a, b)| alpha_equiv(a, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::goalsys::parse_goal;

    fn g(s: &str) -> Goal {
        parse_goal(s).unwrap()
    }

    #[test]
    fn alpha_examples() {
        assert!(alpha_equiv(&g("|- add(x,y) = add(y,x)"), &g("|- add(u,v) = add(v,u)")));
        assert!(!alpha_equiv(&g("|- add(x,x) = x"), &g("|- add(x,y) = x")));
        let same = g("len(a) = 0 |- app(a,b) = b");
        assert!(alpha_equiv(&same, &same));
    }

    #[test]
    fn hypothesis_order_matters() {
        let a = g("x = 0, y = 0 |- x = y");
        let b = g("y = 0, x = 0 |- x = y");
        assert!(!alpha_equiv(&a, &b));
    }

    #[test]
    fn sorts_flow_through_equations() {
        let goal = g("l = k |- k = app(m,nil)");
        let s = goal.var_sorts();
        assert_eq!(s["k"], Sort::List);
        assert_eq!(s["l"], Sort::List);
        assert_eq!(s["m"], Sort::List);
        assert_eq!(g("|- x = x").var_sorts()["x"], Sort::Nat);
    }

    #[test]
    fn list_subsumption() {
        let a = g("|- x = 0");
        let b = g("|- y = S(0)");
        assert!(goal_list_subsumed(&[], std::slice::from_ref(&a)));
        assert!(goal_list_subsumed(std::slice::from_ref(&a), &[a.clone(), b.clone()]));
        assert!(!goal_list_subsumed(&[b], &[a]));
    }
}
