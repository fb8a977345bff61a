use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Sorts of the monomorphic signature.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sort {
    Nat,
    List,
}

impl Sort {
    pub fn name(self) -> &'static str {
        match self {
            Sort::Nat => "nat",
            Sort::List => "list",
        }
    }
}

/// The fixed function signature: Peano naturals and lists of naturals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Symbol {
    Zero,
    Succ,
    Add,
    Mul,
    Nil,
    Cons,
    App,
    Len,
    Rev,
}

impl Symbol {
    pub const ALL: [Symbol; 9] = [
        Symbol::Zero,
        Symbol::Succ,
        Symbol::Add,
        Symbol::Mul,
        Symbol::Nil,
        Symbol::Cons,
        Symbol::App,
        Symbol::Len,
        Symbol::Rev,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Symbol::Zero => "0",
            Symbol::Succ => "S",
            Symbol::Add => "add",
            Symbol::Mul => "mul",
            Symbol::Nil => "nil",
            Symbol::Cons => "cons",
            Symbol::App => "app",
            Symbol::Len => "len",
            Symbol::Rev => "rev",
        }
    }

    pub fn from_name(name: &str) -> Option<Symbol> {
        Symbol::ALL.into_iter().find(|s| s.name() == name)
    }

    pub fn arity(self) -> usize {
        self.arg_sorts().len()
    }

    pub fn arg_sorts(self) -> &'static [Sort] {
        use Sort::*;
        match self {
            Symbol::Zero | Symbol::Nil => &[],
            Symbol::Succ => &[Nat],
            Symbol::Add | Symbol::Mul => &[Nat, Nat],
            Symbol::Cons => &[Nat, List],
            Symbol::App => &[List, List],
            Symbol::Len | Symbol::Rev => &[List],
        }
    }

    pub fn result_sort(self) -> Sort {
        match self {
            Symbol::Zero | Symbol::Succ | Symbol::Add | Symbol::Mul | Symbol::Len => Sort::Nat,
            Symbol::Nil | Symbol::Cons | Symbol::App | Symbol::Rev => Sort::List,
        }
    }
}

/// First-order term over the fixed signature.
///
/// The derived ordering is total and is what ordered rewriting uses to
/// orient permutative equations.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Term {
    Var(String),
    App(Symbol, Vec<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    /// Builds an application. Panics on an arity mismatch; the parser is the
    /// checked entry point for untrusted input.
    pub fn app(sym: Symbol, args: Vec<Term>) -> Term {
        assert_eq!(sym.arity(), args.len(), "arity mismatch for {}", sym.name());
        Term::App(sym, args)
    }

    pub fn constant(sym: Symbol) -> Term {
        Term::app(sym, Vec::new())
    }

    pub fn zero() -> Term {
        Term::constant(Symbol::Zero)
    }

    pub fn nil() -> Term {
        Term::constant(Symbol::Nil)
    }

    pub fn succ(t: Term) -> Term {
        Term::app(Symbol::Succ, vec![t])
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    pub fn contains_var(&self, v: &str) -> bool {
        match self {
            Term::Var(x) => x == v,
            Term::App(_, args) => args.iter().any(|a| a.contains_var(v)),
        }
    }

    /// Variables in order of first occurrence.
    pub fn vars_into(&self, out: &mut Vec<String>) {
        match self {
            Term::Var(x) => {
                if !out.iter().any(|y| y == x) {
                    out.push(x.clone());
                }
            }
            Term::App(_, args) => args.iter().for_each(|a| a.vars_into(out)),
        }
    }

    pub fn vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.vars_into(&mut out);
        out
    }

    /// Simultaneous substitution of variables.
    pub fn subst(&self, map: &BTreeMap<String, Term>) -> Term {
        match self {
            Term::Var(x) => map.get(x).cloned().unwrap_or_else(|| self.clone()),
            Term::App(s, args) => Term::App(*s, args.iter().map(|a| a.subst(map)).collect()),
        }
    }

    pub fn subst1(&self, v: &str, by: &Term) -> Term {
        match self {
            Term::Var(x) if x == v => by.clone(),
            Term::Var(_) => self.clone(),
            Term::App(s, args) => Term::App(*s, args.iter().map(|a| a.subst1(v, by)).collect()),
        }
    }

    pub fn rename(&self, map: &BTreeMap<String, String>) -> Term {
        match self {
            Term::Var(x) => Term::Var(map.get(x).cloned().unwrap_or_else(|| x.clone())),
            Term::App(s, args) => Term::App(*s, args.iter().map(|a| a.rename(map)).collect()),
        }
    }

    /// Pre-order visit of every subterm.
    pub fn for_each_subterm<'a>(&'a self, f: &mut impl FnMut(&'a Term)) {
        f(self);
        if let Term::App(_, args) = self {
            for a in args {
                a.for_each_subterm(f);
            }
        }
    }

    /// Sort of the term if it can be read off its head symbol.
    pub fn head_sort(&self) -> Option<Sort> {
        match self {
            Term::Var(_) => None,
            Term::App(s, _) => Some(s.result_sort()),
        }
    }

    /// Records sorts forced on variables by argument positions.
    pub fn collect_var_sorts(&self, out: &mut BTreeMap<String, Sort>) {
        if let Term::App(s, args) = self {
            for (a, sort) in args.iter().zip(s.arg_sorts()) {
                if let Term::Var(x) = a {
                    out.entry(x.clone()).or_insert(*sort);
                }
                a.collect_var_sorts(out);
            }
        }
    }

    /// Printed form with every variable replaced by the placeholder `V`.
    pub fn masked(&self) -> String {
        let mut s = String::new();
        self.write_masked(&mut s);
        s
    }

    fn write_masked(&self, out: &mut String) {
        match self {
            Term::Var(_) => out.push('V'),
            Term::App(sym, args) => {
                out.push_str(sym.name());
                if !args.is_empty() {
                    out.push('(');
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            out.push(',');
                        }
                        a.write_masked(out);
                    }
                    out.push(')');
                }
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(x) => f.write_str(x),
            Term::App(sym, args) => {
                f.write_str(sym.name())?;
                if !args.is_empty() {
                    f.write_str("(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            f.write_str(",")?;
                        }
                        write!(f, "{a}")?;
                    }
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Equation {
    pub lhs: Term,
    pub rhs: Term,
}

impl Equation {
    pub fn new(lhs: Term, rhs: Term) -> Equation {
        Equation { lhs, rhs }
    }

    pub fn flipped(&self) -> Equation {
        Equation::new(self.rhs.clone(), self.lhs.clone())
    }

    pub fn contains_var(&self, v: &str) -> bool {
        self.lhs.contains_var(v) || self.rhs.contains_var(v)
    }

    pub fn subst1(&self, v: &str, by: &Term) -> Equation {
        Equation::new(self.lhs.subst1(v, by), self.rhs.subst1(v, by))
    }

    pub fn rename(&self, map: &BTreeMap<String, String>) -> Equation {
        Equation::new(self.lhs.rename(map), self.rhs.rename(map))
    }

    pub fn vars_into(&self, out: &mut Vec<String>) {
        self.lhs.vars_into(out);
        self.rhs.vars_into(out);
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.lhs, self.rhs)
    }
}
