use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::env::TheoremEnv;
use super::goal::Goal;
use super::rewrite::{auto_search, eval_ground, normalize, Budget, DeadlineExceeded, Rule, REWRITE_STEP_LIMIT};
use super::tactic::{TacUnit, Tactic, TacticCode, ThmList};
use super::term::{Equation, Sort, Term};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TacticOutcome {
    Success(Vec<Goal>),
    Failure(String),
    Timeout,
}

impl TacticOutcome {
    pub fn is_success(&self) -> bool {
        matches!(self, TacticOutcome::Success(_))
    }

    pub fn closes(&self) -> bool {
        matches!(self, TacticOutcome::Success(gs) if gs.is_empty())
    }

    pub fn goals(&self) -> Option<&[Goal]> {
        match self {
            TacticOutcome::Success(gs) => Some(gs),
            _ => None,
        }
    }
}

fn fail<T>(reason: impl Into<String>) -> Result<T, Stop> {
    Err(Stop::Failure(reason.into()))
}

enum Stop {
    Failure(String),
    Timeout,
}

impl From<DeadlineExceeded> for Stop {
    fn from(_: DeadlineExceeded) -> Stop {
        Stop::Timeout
    }
}

/// Result of rewriting a goal's conclusion, with the number of rewrite
/// steps spent (never above [`REWRITE_STEP_LIMIT`]).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewriteReport {
    pub outcome: TacticOutcome,
    pub steps: usize,
}

/// Executes tactics against the theorems of one environment.
#[derive(Clone, Copy)]
pub struct Interpreter<'a> {
    env: &'a TheoremEnv,
}

impl<'a> Interpreter<'a> {
    pub fn new(env: &'a TheoremEnv) -> Interpreter<'a> {
        Interpreter { env }
    }

    pub fn env(&self) -> &'a TheoremEnv {
        self.env
    }

    /// Runs `tac` on `g` under a wall-clock budget covering the whole
    /// compound tactic.
    pub fn apply(&self, tac: &Tactic, g: &Goal, timeout: Duration) -> TacticOutcome {
        let deadline = Instant::now() + timeout;
        match self.run(tac, g, deadline) {
            Ok(goals) => TacticOutcome::Success(goals),
            Err(Stop::Failure(r)) => TacticOutcome::Failure(r),
            Err(Stop::Timeout) => TacticOutcome::Timeout,
        }
    }

    pub fn apply_code(&self, code: &TacticCode, g: &Goal, timeout: Duration) -> TacticOutcome {
        match Tactic::parse(code.as_str()) {
            Ok(t) => self.apply(&t, g, timeout),
            Err(e) => TacticOutcome::Failure(e.to_string()),
        }
    }

    /// True iff `script` closes `g` with no goals left over.
    pub fn replay(&self, script: &Tactic, g: &Goal, timeout: Duration) -> bool {
        self.apply(script, g, timeout).closes()
    }

    fn run(&self, tac: &Tactic, g: &Goal, deadline: Instant) -> Result<Vec<Goal>, Stop> {
        if Instant::now() >= deadline {
            return Err(Stop::Timeout);
        }
        match tac {
            Tactic::Unit(u) => self.run_unit(u, g, deadline),
            Tactic::Then(a, b) => {
                let mut out = Vec::new();
                for sub in self.run(a, g, deadline)? {
                    out.extend(self.run(b, &sub, deadline)?);
                }
                Ok(out)
            }
            Tactic::ThenL(a, bs) => {
                let subs = self.run(a, g, deadline)?;
                if subs.len() != bs.len() {
                    return fail(format!("THENL expects {} goals, got {}", bs.len(), subs.len()));
                }
                let mut out = Vec::new();
                for (sub, b) in subs.iter().zip(bs) {
                    out.extend(self.run(b, sub, deadline)?);
                }
                Ok(out)
            }
        }
    }

    fn run_unit(&self, u: &TacUnit, g: &Goal, deadline: Instant) -> Result<Vec<Goal>, Stop> {
        match u {
            TacUnit::Refl => {
                let rules = self.simpset_rules();
                let mut b = Budget::new(REWRITE_STEP_LIMIT, deadline);
                let l = eval_ground(&g.concl.lhs, &rules, &mut b)?;
                let r = eval_ground(&g.concl.rhs, &rules, &mut b)?;
                if l == r {
                    Ok(Vec::new())
                } else {
                    fail("sides differ")
                }
            }
            TacUnit::Sym => Ok(vec![Goal::new(g.hyps.clone(), g.concl.flipped())]),
            TacUnit::Assumption => {
                let flipped = g.concl.flipped();
                if g.hyps.iter().any(|h| *h == g.concl || *h == flipped) {
                    Ok(Vec::new())
                } else {
                    fail("no matching hypothesis")
                }
            }
            TacUnit::Rewrite(_) | TacUnit::RewriteRev(_) | TacUnit::Simp(_) => {
                let (res, _) = self.rewrite_inner(u, g, deadline)?;
                Ok(res)
            }
            TacUnit::Auto(list) => {
                let thms = self.theorem_equations(list)?;
                let mut forward = self.hyp_rules(g);
                forward.extend(thms.iter().filter_map(Rule::schematic));
                forward.extend(self.simpset_rules());
                let mut steps = Vec::new();
                for eq in &thms {
                    for e in [eq.clone(), eq.flipped()] {
                        if let Some(mut r) = Rule::schematic(&e) {
                            r.permutative = false;
                            steps.push(r);
                        }
                    }
                }
                for h in &g.hyps {
                    steps.extend(Rule::rigid(h));
                    steps.extend(Rule::rigid(&h.flipped()));
                }
                if auto_search(&g.concl, &forward, &steps, deadline)? {
                    Ok(Vec::new())
                } else {
                    fail("search exhausted")
                }
            }
            TacUnit::Induct(v) => {
                if !g.concl.contains_var(v) {
                    return fail(format!("`{v}` does not occur in the conclusion"));
                }
                if g.hyps_contain_var(v) {
                    return fail(format!("`{v}` occurs in a hypothesis"));
                }
                let (base, step) = self.constructors(g, v);
                let mut hyps = g.hyps.clone();
                hyps.push(g.concl.clone());
                Ok(vec![
                    Goal::new(g.hyps.clone(), g.concl.subst1(v, &base)),
                    Goal::new(hyps, g.concl.subst1(v, &step)),
                ])
            }
            TacUnit::Cases(v) => {
                if !g.contains_var(v) {
                    return fail(format!("`{v}` does not occur in the goal"));
                }
                let (base, step) = self.constructors(g, v);
                Ok(vec![g.subst1(v, &base), g.subst1(v, &step)])
            }
            TacUnit::Alias(a) => fail(format!("unexpanded alias `{a}`")),
        }
    }

    /// Base and step constructor instances for case analysis on `v`.
    fn constructors(&self, g: &Goal, v: &str) -> (Term, Term) {
        let var = Term::var(v);
        match g.var_sorts().get(v).copied().unwrap_or(Sort::Nat) {
            Sort::Nat => (Term::zero(), Term::succ(var)),
            Sort::List => {
                let used = g.vars();
                let head = std::iter::once("h".to_string())
                    .chain((1..).map(|i| format!("h{i}")))
                    .find(|n| !used.contains(n))
                    .expect("unbounded name supply");
                (Term::nil(), Term::app(super::term::Symbol::Cons, vec![Term::var(head), var]))
            }
        }
    }

    /// Rewrites the conclusion with a `Rewrite`, `RewriteRev` or `Simp` unit.
    pub fn rewrite_conclusion(&self, u: &TacUnit, g: &Goal, timeout: Duration) -> RewriteReport {
        let deadline = Instant::now() + timeout;
        match self.rewrite_inner(u, g, deadline) {
            Ok((goals, steps)) => RewriteReport {
                outcome: TacticOutcome::Success(goals),
                steps,
            },
            Err(Stop::Failure(r)) => RewriteReport {
                outcome: TacticOutcome::Failure(r),
                steps: 0,
            },
            Err(Stop::Timeout) => RewriteReport {
                outcome: TacticOutcome::Timeout,
                steps: 0,
            },
        }
    }

    fn rewrite_inner(&self, u: &TacUnit, g: &Goal, deadline: Instant) -> Result<(Vec<Goal>, usize), Stop> {
        let rules = match u {
            TacUnit::Rewrite(list) => {
                let mut rules = self.hyp_rules(g);
                rules.extend(self.theorem_equations(list)?.iter().filter_map(Rule::schematic));
                rules
            }
            TacUnit::RewriteRev(list) => self
                .theorem_equations(list)?
                .iter()
                .filter_map(|e| Rule::schematic(&e.flipped()))
                .collect(),
            TacUnit::Simp(list) => {
                let mut rules = self.hyp_rules(g);
                rules.extend(self.theorem_equations(list)?.iter().filter_map(Rule::schematic));
                rules.extend(self.simpset_rules());
                rules
            }
            other => return Err(Stop::Failure(format!("`{other}` is not a rewriting tactic"))),
        };
        let mut b = Budget::new(REWRITE_STEP_LIMIT, deadline);
        let lhs = normalize(&g.concl.lhs, &rules, &mut b)?;
        let rhs = normalize(&g.concl.rhs, &rules, &mut b)?;
        if lhs == rhs {
            return Ok((Vec::new(), b.steps));
        }
        if b.steps == 0 {
            return fail("no rewrite applied");
        }
        Ok((vec![Goal::new(g.hyps.clone(), Equation::new(lhs, rhs))], b.steps))
    }

    fn hyp_rules(&self, g: &Goal) -> Vec<Rule> {
        g.hyps.iter().filter_map(Rule::rigid).collect()
    }

    fn simpset_rules(&self) -> Vec<Rule> {
        self.env.simpset().iter().filter_map(Rule::schematic).collect()
    }

    /// Conclusions of the listed theorems. Conditional theorems (with
    /// hypotheses) are not usable as equations and are skipped.
    fn theorem_equations(&self, list: &ThmList) -> Result<Vec<Equation>, Stop> {
        let ThmList::Lit(refs) = list else {
            return Err(Stop::Failure("uninstantiated theorem-list placeholder".into()));
        };
        let mut out = Vec::new();
        for r in refs {
            match self.env.resolve(r) {
                Some(stmt) if stmt.hyps.is_empty() => out.push(stmt.concl.clone()),
                Some(_) => {}
                None => return Err(Stop::Failure(format!("unknown theorem `{r}`"))),
            }
        }
        Ok(out)
    }
}

/// Parses and runs `code` on `g` against `env`.
pub fn apply_tactic(env: &TheoremEnv, code: &TacticCode, g: &Goal, timeout: Duration) -> TacticOutcome {
    Interpreter::new(env).apply_code(code, g, timeout)
}

/// True iff `script` closes `g` in `env`.
pub fn replay_proof(env: &TheoremEnv, script: &Tactic, g: &Goal, timeout: Duration) -> bool {
    Interpreter::new(env).replay(script, g, timeout)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::goalsys::parse_goal;

    const T: Duration = Duration::from_secs(2);

    fn run(tac: &str, goal: &str) -> TacticOutcome {
        let env = TheoremEnv::new();
        apply_tactic(&env, &TacticCode::parse(tac).unwrap(), &parse_goal(goal).unwrap(), T)
    }

    fn goals(texts: &[&str]) -> TacticOutcome {
        TacticOutcome::Success(texts.iter().map(|s| parse_goal(s).unwrap()).collect())
    }

    #[test]
    fn refl() {
        assert_eq!(run("Refl", "|- x = x"), goals(&[]));
        assert!(matches!(run("Refl", "|- add(0,x) = x"), TacticOutcome::Failure(_)));
        // closed subterms are evaluated
        assert_eq!(run("Refl", "|- add(0,0) = 0"), goals(&[]));
    }

    #[test]
    fn nat_induction_schema() {
        assert_eq!(
            run("Induct \"n\"", "|- add(n,0) = n"),
            goals(&["|- add(0,0) = 0", "add(n,0) = n |- add(S(n),0) = S(n)"])
        );
    }

    #[test]
    fn list_induction_uses_fresh_head() {
        assert_eq!(
            run("Induct \"l\"", "|- app(l,cons(h,nil)) = app(l,cons(h,nil))"),
            goals(&[
                "|- app(nil,cons(h,nil)) = app(nil,cons(h,nil))",
                "app(l,cons(h,nil)) = app(l,cons(h,nil)) |- app(cons(h1,l),cons(h,nil)) = app(cons(h1,l),cons(h,nil))",
            ])
        );
    }

    #[test]
    fn induction_refuses_hypothesis_variables() {
        assert!(matches!(run("Induct \"n\"", "n = 0 |- add(n,0) = n"), TacticOutcome::Failure(_)));
        assert!(matches!(run("Induct \"q\"", "|- add(n,0) = n"), TacticOutcome::Failure(_)));
    }

    #[test]
    fn cases_substitutes_everywhere() {
        assert_eq!(
            run("Cases \"l\"", "len(l) = 0 |- l = nil"),
            goals(&["len(nil) = 0 |- nil = nil", "len(cons(h,l)) = 0 |- cons(h,l) = nil"])
        );
    }

    #[test]
    fn rewrite_failure_and_closure() {
        assert!(matches!(run("Rewrite []", "|- add(0,x) = x"), TacticOutcome::Failure(_)));
        assert_eq!(run("Simp []", "|- add(0,x) = x"), goals(&[]));
        assert_eq!(run("Simp []", "|- add(S(x),0) = y"), goals(&["|- S(add(x,0)) = y"]));
        assert_eq!(run("Rewrite []", "add(n,0) = n |- S(add(n,0)) = S(n)"), goals(&[]));
        assert!(matches!(run("Simp [nope]", "|- x = x"), TacticOutcome::Failure(_)));
        assert!(matches!(run("Simp □", "|- x = x"), TacticOutcome::Failure(_)));
    }

    #[test]
    fn rewrite_with_theorems() {
        let mut env = TheoremEnv::new();
        env.add("nat", "add_0_r", parse_goal("|- add(n,0) = n").unwrap());
        env.set_theory("nat");
        let g = parse_goal("|- add(add(x,0),0) = x").unwrap();
        let out = apply_tactic(&env, &TacticCode::parse("Rewrite [add_0_r]").unwrap(), &g, T);
        assert_eq!(out, goals(&[]));
        let g = parse_goal("|- x = y").unwrap();
        let out = apply_tactic(&env, &TacticCode::parse("RewriteRev [add_0_r]").unwrap(), &g, T);
        assert!(matches!(out, TacticOutcome::Failure(_)));
    }

    #[test]
    fn replay_examples() {
        let env = TheoremEnv::new();
        let p = |s: &str| Tactic::parse(s).unwrap();
        let g = |s: &str| parse_goal(s).unwrap();
        assert!(replay_proof(&env, &p("Refl"), &g("|- x = x"), T));
        assert!(replay_proof(&env, &p("Induct \"n\" THENL [Refl, Simp []]"), &g("|- add(n,0) = n"), T));
        assert!(!replay_proof(&env, &p("Refl"), &g("|- add(0,x) = x"), T));
        assert!(!replay_proof(&env, &p("Induct \"n\" THENL [Refl]"), &g("|- add(n,0) = n"), T));
    }

    #[test]
    fn auto_closes_or_fails() {
        let mut env = TheoremEnv::new();
        env.add("nat", "add_comm", parse_goal("|- add(n,m) = add(m,n)").unwrap());
        env.add("nat", "add_0_r", parse_goal("|- add(n,0) = n").unwrap());
        env.set_theory("nat");
        let g = parse_goal("|- add(x,add(0,y)) = add(y,x)").unwrap();
        let out = apply_tactic(&env, &TacticCode::parse("Auto [add_comm]").unwrap(), &g, T);
        assert_eq!(out, goals(&[]));
        let g = parse_goal("|- add(x,y) = x").unwrap();
        let out = apply_tactic(&env, &TacticCode::parse("Auto [add_comm, add_0_r]").unwrap(), &g, T);
        assert!(matches!(out, TacticOutcome::Failure(_)));
    }

    #[test]
    fn then_and_thenl_arity() {
        assert_eq!(run("Induct \"n\" THEN Simp []", "|- add(0,n) = n"), goals(&[]));
        assert!(matches!(
            run("Induct \"n\" THENL [Refl]", "|- add(n,0) = n"),
            TacticOutcome::Failure(_)
        ));
    }

    #[test]
    fn expired_budget_times_out() {
        let env = TheoremEnv::new();
        let g = parse_goal("|- x = x").unwrap();
        let out = Interpreter::new(&env).apply(&Tactic::parse("Refl").unwrap(), &g, Duration::ZERO);
        assert_eq!(out, TacticOutcome::Timeout);
    }
}
