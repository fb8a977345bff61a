use std::cmp::Ordering;
use std::collections::{BTreeMap, HashSet, VecDeque};
use std::time::Instant;

use super::term::{Equation, Term};

/// Maximum rewrite steps per conclusion-rewriting call.
pub const REWRITE_STEP_LIMIT: usize = 1000;
/// Depth bound of the `Auto` search.
pub const AUTO_MAX_DEPTH: usize = 4;
/// State budget of the `Auto` search.
pub const AUTO_NODE_BUDGET: usize = 5000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DeadlineExceeded;

/// An oriented equation. Schematic rules instantiate their variables;
/// rigid ones (goal hypotheses) match literally.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub lhs: Term,
    pub rhs: Term,
    pub schematic: bool,
    /// Instances are applied only when the result is smaller in
    /// [`term_order`], so commutativity-like equations terminate.
    pub permutative: bool,
}

impl Rule {
    /// Orients `eq` left to right if that makes a usable rule.
    pub fn schematic(eq: &Equation) -> Option<Rule> {
        if eq.lhs.is_var() || eq.lhs == eq.rhs {
            return None;
        }
        let lhs_vars = eq.lhs.vars();
        if !eq.rhs.vars().iter().all(|v| lhs_vars.contains(v)) {
            return None;
        }
        Some(Rule {
            permutative: is_variant(&eq.lhs, &eq.rhs),
            lhs: eq.lhs.clone(),
            rhs: eq.rhs.clone(),
            schematic: true,
        })
    }

    pub fn rigid(eq: &Equation) -> Option<Rule> {
        if eq.lhs == eq.rhs {
            return None;
        }
        Some(Rule {
            lhs: eq.lhs.clone(),
            rhs: eq.rhs.clone(),
            schematic: false,
            permutative: false,
        })
    }

    /// Result of applying the rule at the root of `t`, if it applies.
    pub fn apply_at_root(&self, t: &Term) -> Option<Term> {
        if !self.schematic {
            return (t == &self.lhs).then(|| self.rhs.clone());
        }
        let mut subst = BTreeMap::new();
        if !match_term(&self.lhs, t, &mut subst) {
            return None;
        }
        let out = self.rhs.subst(&subst);
        if self.permutative && term_order(&out, t) != Ordering::Less {
            return None;
        }
        Some(out)
    }
}

/// Size first, then head symbol, then arguments left to right; variables
/// precede applications. Ordering by size first makes ordered rewriting with
/// commutativity and left-commutativity sort operands by size, so
/// `add(len(a),add(b,c))` and `add(c,add(len(a),b))` meet.
pub fn term_order(a: &Term, b: &Term) -> Ordering {
    a.size().cmp(&b.size()).then_with(|| structural_order(a, b))
}

fn structural_order(a: &Term, b: &Term) -> Ordering {
    match (a, b) {
        (Term::Var(x), Term::Var(y)) => x.cmp(y),
        (Term::Var(_), Term::App(..)) => Ordering::Less,
        (Term::App(..), Term::Var(_)) => Ordering::Greater,
        (Term::App(f, xs), Term::App(g, ys)) => f.cmp(g).then_with(|| {
            xs.iter()
                .zip(ys)
                .map(|(x, y)| term_order(x, y))
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal)
        }),
    }
}

/// Same shape up to a renaming of variables.
fn is_variant(a: &Term, b: &Term) -> bool {
    let mut fwd = BTreeMap::new();
    let mut bwd = BTreeMap::new();
    variant_walk(a, b, &mut fwd, &mut bwd)
}

fn variant_walk<'a>(
    a: &'a Term,
    b: &'a Term,
    fwd: &mut BTreeMap<&'a str, &'a str>,
    bwd: &mut BTreeMap<&'a str, &'a str>,
) -> bool {
    match (a, b) {
        (Term::Var(x), Term::Var(y)) => {
            *fwd.entry(x).or_insert(y) == y.as_str() && *bwd.entry(y).or_insert(x) == x.as_str()
        }
        (Term::App(f, xs), Term::App(g, ys)) => {
            f == g && xs.iter().zip(ys).all(|(x, y)| variant_walk(x, y, fwd, bwd))
        }
        _ => false,
    }
}

pub fn match_term(pat: &Term, t: &Term, subst: &mut BTreeMap<String, Term>) -> bool {
    match pat {
        Term::Var(v) => match subst.get(v) {
            Some(bound) => bound == t,
            None => {
                subst.insert(v.clone(), t.clone());
                true
            }
        },
        Term::App(f, ps) => match t {
            Term::App(g, ts) if f == g => ps.iter().zip(ts).all(|(p, a)| match_term(p, a, subst)),
            _ => false,
        },
    }
}

/// Step counter plus wall-clock deadline shared by one tactic application.
pub struct Budget {
    pub steps: usize,
    pub limit: usize,
    pub deadline: Instant,
}

impl Budget {
    pub fn new(limit: usize, deadline: Instant) -> Budget {
        Budget {
            steps: 0,
            limit,
            deadline,
        }
    }

    pub fn check_time(&self) -> Result<(), DeadlineExceeded> {
        if Instant::now() >= self.deadline {
            Err(DeadlineExceeded)
        } else {
            Ok(())
        }
    }
}

/// `args` with position `i` replaced; only the siblings are cloned.
fn replace_arg(args: &[Term], i: usize, new: Term) -> Vec<Term> {
    let mut new = Some(new);
    args.iter()
        .enumerate()
        .map(|(j, a)| if j == i { new.take().unwrap() } else { a.clone() })
        .collect()
}

/// One leftmost-outermost step: the first position in pre-order where some
/// rule applies. At a position, non-permutative rules are tried before
/// permutative ones, each group in list order.
pub fn rewrite_once(t: &Term, rules: &[Rule]) -> Option<Term> {
    for permutative in [false, true] {
        for r in rules.iter().filter(|r| r.permutative == permutative) {
            if let Some(out) = r.apply_at_root(t) {
                return Some(out);
            }
        }
    }
    if let Term::App(f, args) = t {
        for (i, a) in args.iter().enumerate() {
            if let Some(new) = rewrite_once(a, rules) {
                return Some(Term::App(*f, replace_arg(args, i, new)));
            }
        }
    }
    None
}

/// Rewrites until normal form or until the step limit is reached.
pub fn normalize(t: &Term, rules: &[Rule], budget: &mut Budget) -> Result<Term, DeadlineExceeded> {
    let mut cur = t.clone();
    while budget.steps < budget.limit {
        budget.check_time()?;
        match rewrite_once(&cur, rules) {
            Some(next) => {
                cur = next;
                budget.steps += 1;
            }
            None => break,
        }
    }
    Ok(cur)
}

/// Evaluates closed subterms with the given definitional rules.
pub fn eval_ground(t: &Term, rules: &[Rule], budget: &mut Budget) -> Result<Term, DeadlineExceeded> {
    if t.is_ground() {
        return normalize(t, rules, budget);
    }
    match t {
        Term::Var(_) => Ok(t.clone()),
        Term::App(f, args) => {
            let args = args
                .iter()
                .map(|a| eval_ground(a, rules, budget))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Term::App(*f, args))
        }
    }
}

/// Every term reachable from `t` by one rule application at any position.
fn single_steps(t: &Term, rules: &[Rule], out: &mut Vec<Term>) {
    for r in rules {
        if let Some(new) = r.apply_at_root(t) {
            out.push(new);
        }
    }
    if let Term::App(f, args) = t {
        for (i, a) in args.iter().enumerate() {
            let mut inner = Vec::new();
            single_steps(a, rules, &mut inner);
            for new in inner {
                out.push(Term::App(*f, replace_arg(args, i, new)));
            }
        }
    }
}

/// Bounded search for a rewrite proof of `eq`.
///
/// Both sides are normalized with `forward`; then a breadth-first search
/// applies single `steps` rewrites anywhere in either side, renormalizing
/// each successor, until the sides coincide. Depth is at most
/// [`AUTO_MAX_DEPTH`] and at most [`AUTO_NODE_BUDGET`] states are generated.
pub fn auto_search(
    eq: &Equation,
    forward: &[Rule],
    steps: &[Rule],
    deadline: Instant,
) -> Result<bool, DeadlineExceeded> {
    let norm = |e: &Equation| -> Result<Equation, DeadlineExceeded> {
        let mut b = Budget::new(REWRITE_STEP_LIMIT, deadline);
        let lhs = normalize(&e.lhs, forward, &mut b)?;
        let rhs = normalize(&e.rhs, forward, &mut b)?;
        Ok(Equation::new(lhs, rhs))
    };
    let start = norm(eq)?;
    if start.lhs == start.rhs {
        return Ok(true);
    }
    let mut seen: HashSet<Equation> = HashSet::new();
    seen.insert(start.clone());
    let mut queue = VecDeque::from([(start, 0usize)]);
    let mut generated = 1usize;
    while let Some((state, depth)) = queue.pop_front() {
        if depth >= AUTO_MAX_DEPTH {
            continue;
        }
        let mut succ = Vec::new();
        let mut sides = Vec::new();
        single_steps(&state.lhs, steps, &mut sides);
        succ.extend(sides.drain(..).map(|l| Equation::new(l, state.rhs.clone())));
        single_steps(&state.rhs, steps, &mut sides);
        succ.extend(sides.drain(..).map(|r| Equation::new(state.lhs.clone(), r)));
        for next in succ {
            if Instant::now() >= deadline {
                return Err(DeadlineExceeded);
            }
            let next = norm(&next)?;
            if next.lhs == next.rhs {
                return Ok(true);
            }
            if seen.insert(next.clone()) {
                generated += 1;
                if generated > AUTO_NODE_BUDGET {
                    return Ok(false);
                }
                queue.push_back((next, depth + 1));
            }
        }
    }
    Ok(false)
}
