use std::collections::BTreeMap;

use super::goal::Goal;
use super::parse::parse_goal;
use super::tactic::ThmRef;
use super::term::Equation;

/// Theory holding the definitional equations of the signature.
pub const BASE_THEORY: &str = "base";

/// Defining equations of `add`, `mul`, `app`, `len` and `rev`. They form the
/// built-in simpset and are also addressable as `base.<name>`.
pub const BASE_DEFINITIONS: [(&str, &str); 10] = [
    ("add_def0", "|- add(0,m) = m"),
    ("add_defS", "|- add(S(n),m) = S(add(n,m))"),
    ("mul_def0", "|- mul(0,m) = 0"),
    ("mul_defS", "|- mul(S(n),m) = add(m,mul(n,m))"),
    ("app_def_nil", "|- app(nil,l) = l"),
    ("app_def_cons", "|- app(cons(h,t),l) = cons(h,app(t,l))"),
    ("len_def_nil", "|- len(nil) = 0"),
    ("len_def_cons", "|- len(cons(h,t)) = S(len(t))"),
    ("rev_def_nil", "|- rev(nil) = nil"),
    ("rev_def_cons", "|- rev(cons(h,t)) = app(rev(t),cons(h,nil))"),
];

/// Theorems visible at some point of a development, plus the theory that
/// unqualified names are resolved against first.
#[derive(Clone, Debug)]
pub struct TheoremEnv {
    current: String,
    theorems: BTreeMap<(String, String), Goal>,
    by_name: BTreeMap<String, Vec<String>>,
    simpset: Vec<Equation>,
}

impl Default for TheoremEnv {
    fn default() -> Self {
        TheoremEnv::new()
    }
}

impl TheoremEnv {
    /// Environment containing only the base definitions.
    pub fn new() -> TheoremEnv {
        let mut env = TheoremEnv {
            current: BASE_THEORY.to_string(),
            theorems: BTreeMap::new(),
            by_name: BTreeMap::new(),
            simpset: Vec::new(),
        };
        for (name, text) in BASE_DEFINITIONS {
            let g = parse_goal(text).expect("base definitions parse");
            env.simpset.push(g.concl.clone());
            env.add(BASE_THEORY, name, g);
        }
        env
    }

    pub fn current_theory(&self) -> &str {
        &self.current
    }

    pub fn set_theory(&mut self, theory: impl Into<String>) {
        self.current = theory.into();
    }

    pub fn with_theory(&self, theory: &str) -> TheoremEnv {
        let mut env = self.clone();
        env.set_theory(theory);
        env
    }

    pub fn add(&mut self, theory: &str, name: &str, statement: Goal) {
        let key = (theory.to_string(), name.to_string());
        if self.theorems.insert(key, statement).is_none() {
            self.by_name.entry(name.to_string()).or_default().push(theory.to_string());
        }
    }

    pub fn contains(&self, theory: &str, name: &str) -> bool {
        self.theorems.contains_key(&(theory.to_string(), name.to_string()))
    }

    pub fn len(&self) -> usize {
        self.theorems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theorems.is_empty()
    }

    pub fn simpset(&self) -> &[Equation] {
        &self.simpset
    }

    /// Theories declaring a theorem with this name, in declaration order.
    pub fn theories_of(&self, name: &str) -> &[String] {
        self.by_name.get(name).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Fully qualified reference for `r`: qualified names must exist;
    /// unqualified ones resolve to the current theory first, then to the
    /// unique theory declaring the name.
    pub fn qualify(&self, r: &ThmRef) -> Option<ThmRef> {
        match &r.theory {
            Some(t) => self.contains(t, &r.name).then(|| r.clone()),
            None => {
                if self.contains(&self.current, &r.name) {
                    return Some(ThmRef::qualified(self.current.clone(), r.name.clone()));
                }
                match self.theories_of(&r.name) {
                    [only] => Some(ThmRef::qualified(only.clone(), r.name.clone())),
                    _ => None,
                }
            }
        }
    }

    pub fn resolve(&self, r: &ThmRef) -> Option<&Goal> {
        let q = self.qualify(r)?;
        self.theorems.get(&(q.theory.unwrap(), q.name))
    }

    /// True when dropping the qualifier of `r` still resolves to the same
    /// theorem and no other theory declares the name.
    pub fn unambiguous(&self, r: &ThmRef) -> bool {
        match &r.theory {
            Some(t) => self.theories_of(&r.name) == [t.clone()],
            None => self.theories_of(&r.name).len() == 1,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (ThmRef, &Goal)> {
        self.theorems
            .iter()
            .map(|((t, n), g)| (ThmRef::qualified(t.clone(), n.clone()), g))
    }
}
