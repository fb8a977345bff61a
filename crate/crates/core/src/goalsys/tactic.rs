use std::fmt;

use serde::{Deserialize, Serialize};

use super::parse::{is_var_name, Cursor, SyntaxError};

/// Placeholder standing for an abstracted theorem-list argument.
pub const HOLE: char = '□';

/// Reference to a theorem, qualified (`theory.name`) or not.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ThmRef {
    pub theory: Option<String>,
    pub name: String,
}

impl ThmRef {
    pub fn qualified(theory: impl Into<String>, name: impl Into<String>) -> ThmRef {
        ThmRef {
            theory: Some(theory.into()),
            name: name.into(),
        }
    }

    pub fn bare(name: impl Into<String>) -> ThmRef {
        ThmRef {
            theory: None,
            name: name.into(),
        }
    }
}

impl fmt::Display for ThmRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.theory {
            Some(t) => write!(f, "{t}.{}", self.name),
            None => f.write_str(&self.name),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ThmList {
    Lit(Vec<ThmRef>),
    Hole,
}

impl fmt::Display for ThmList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThmList::Hole => write!(f, "{HOLE}"),
            ThmList::Lit(refs) => {
                f.write_str("[")?;
                for (i, r) in refs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{r}")?;
                }
                f.write_str("]")
            }
        }
    }
}

/// A tactic expression with no combinator at its root.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TacUnit {
    Refl,
    Sym,
    Assumption,
    Rewrite(ThmList),
    RewriteRev(ThmList),
    Simp(ThmList),
    Auto(ThmList),
    Induct(String),
    Cases(String),
    /// Script-local alias; only meaningful before globalization.
    Alias(String),
}

impl TacUnit {
    pub fn thm_list(&self) -> Option<&ThmList> {
        match self {
            TacUnit::Rewrite(l) | TacUnit::RewriteRev(l) | TacUnit::Simp(l) | TacUnit::Auto(l) => Some(l),
            _ => None,
        }
    }

    pub fn thm_list_mut(&mut self) -> Option<&mut ThmList> {
        match self {
            TacUnit::Rewrite(l) | TacUnit::RewriteRev(l) | TacUnit::Simp(l) | TacUnit::Auto(l) => Some(l),
            _ => None,
        }
    }
}

impl fmt::Display for TacUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TacUnit::Refl => f.write_str("Refl"),
            TacUnit::Sym => f.write_str("Sym"),
            TacUnit::Assumption => f.write_str("Assumption"),
            TacUnit::Rewrite(l) => write!(f, "Rewrite {l}"),
            TacUnit::RewriteRev(l) => write!(f, "RewriteRev {l}"),
            TacUnit::Simp(l) => write!(f, "Simp {l}"),
            TacUnit::Auto(l) => write!(f, "Auto {l}"),
            TacUnit::Induct(v) => write!(f, "Induct \"{v}\""),
            TacUnit::Cases(v) => write!(f, "Cases \"{v}\""),
            TacUnit::Alias(a) => f.write_str(a),
        }
    }
}

/// Tactic expression tree. `THEN` and `THENL` share one precedence level
/// and associate to the left.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Tactic {
    Unit(TacUnit),
    Then(Box<Tactic>, Box<Tactic>),
    ThenL(Box<Tactic>, Vec<Tactic>),
}

impl Tactic {
    pub fn unit(u: TacUnit) -> Tactic {
        Tactic::Unit(u)
    }

    pub fn then(a: Tactic, b: Tactic) -> Tactic {
        Tactic::Then(Box::new(a), Box::new(b))
    }

    pub fn then_list(a: Tactic, bs: Vec<Tactic>) -> Tactic {
        Tactic::ThenL(Box::new(a), bs)
    }

    pub fn parse(text: &str) -> Result<Tactic, SyntaxError> {
        let mut cur = Cursor::new(text);
        let t = parse_tactic_at(&mut cur)?;
        if !cur.at_end() {
            return Err(cur.error("trailing input"));
        }
        Ok(t)
    }

    pub fn is_unit(&self) -> bool {
        matches!(self, Tactic::Unit(_))
    }

    /// Leaves in left-to-right execution order.
    pub fn units(&self) -> Vec<&TacUnit> {
        let mut out = Vec::new();
        self.collect_units(&mut out);
        out
    }

    fn collect_units<'a>(&'a self, out: &mut Vec<&'a TacUnit>) {
        match self {
            Tactic::Unit(u) => out.push(u),
            Tactic::Then(a, b) => {
                a.collect_units(out);
                b.collect_units(out);
            }
            Tactic::ThenL(a, bs) => {
                a.collect_units(out);
                bs.iter().for_each(|b| b.collect_units(out));
            }
        }
    }

    pub fn unit_count(&self) -> usize {
        self.units().len()
    }

    /// Rebuilds the tree with every leaf transformed.
    pub fn map_units(&self, f: &mut impl FnMut(&TacUnit) -> Tactic) -> Tactic {
        match self {
            Tactic::Unit(u) => f(u),
            Tactic::Then(a, b) => Tactic::then(a.map_units(f), b.map_units(f)),
            Tactic::ThenL(a, bs) => {
                let a = a.map_units(f);
                Tactic::then_list(a, bs.iter().map(|b| b.map_units(f)).collect())
            }
        }
    }

    pub fn thm_refs(&self) -> Vec<&ThmRef> {
        self.units()
            .into_iter()
            .filter_map(|u| match u.thm_list() {
                Some(ThmList::Lit(refs)) => Some(refs.iter()),
                _ => None,
            })
            .flatten()
            .collect()
    }

    pub fn has_hole(&self) -> bool {
        self.units().iter().any(|u| matches!(u.thm_list(), Some(ThmList::Hole)))
    }

    pub fn code(&self) -> TacticCode {
        TacticCode(self.to_string())
    }
}

impl fmt::Display for Tactic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tactic::Unit(u) => write!(f, "{u}"),
            Tactic::Then(a, b) => {
                write!(f, "{a} THEN ")?;
                if b.is_unit() {
                    write!(f, "{b}")
                } else {
                    write!(f, "({b})")
                }
            }
            Tactic::ThenL(a, bs) => {
                write!(f, "{a} THENL [")?;
                for (i, b) in bs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{b}")?;
                }
                f.write_str("]")
            }
        }
    }
}

/// Canonical printed form of a tactic. Equal codes mean "the same tactic".
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TacticCode(pub String);

impl TacticCode {
    pub fn parse(text: &str) -> Result<TacticCode, SyntaxError> {
        Ok(Tactic::parse(text)?.code())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// The code is canonical, so reparsing cannot fail.
    pub fn tactic(&self) -> Tactic {
        Tactic::parse(&self.0).expect("tactic code is canonical")
    }
}

impl fmt::Display for TacticCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&Tactic> for TacticCode {
    fn from(t: &Tactic) -> TacticCode {
        t.code()
    }
}

const KEYWORDS: [&str; 2] = ["THEN", "THENL"];

pub(crate) fn parse_tactic_at(cur: &mut Cursor) -> Result<Tactic, SyntaxError> {
    let mut acc = parse_atom(cur)?;
    loop {
        cur.skip_ws();
        let save = cur.save();
        match cur.ident().as_deref() {
            Some("THEN") => {
                let rhs = parse_atom(cur)?;
                acc = Tactic::then(acc, rhs);
            }
            Some("THENL") => {
                cur.expect('[')?;
                let mut items = Vec::new();
                if !cur.eat(']') {
                    items.push(parse_tactic_at(cur)?);
                    while cur.eat(',') {
                        items.push(parse_tactic_at(cur)?);
                    }
                    cur.expect(']')?;
                }
                acc = Tactic::then_list(acc, items);
            }
            _ => {
                cur.restore(save);
                return Ok(acc);
            }
        }
    }
}

fn parse_atom(cur: &mut Cursor) -> Result<Tactic, SyntaxError> {
    if cur.eat('(') {
        let t = parse_tactic_at(cur)?;
        cur.expect(')')?;
        return Ok(t);
    }
    cur.skip_ws();
    let start = cur.offset();
    let Some(name) = cur.ident() else {
        return Err(cur.error("expected a tactic"));
    };
    let unit = match name.as_str() {
        "Refl" => TacUnit::Refl,
        "Sym" => TacUnit::Sym,
        "Assumption" => TacUnit::Assumption,
        "Rewrite" => TacUnit::Rewrite(parse_thm_list(cur)?),
        "RewriteRev" => TacUnit::RewriteRev(parse_thm_list(cur)?),
        "Simp" => TacUnit::Simp(parse_thm_list(cur)?),
        "Auto" => TacUnit::Auto(parse_thm_list(cur)?),
        "Induct" => TacUnit::Induct(parse_var_literal(cur)?),
        "Cases" => TacUnit::Cases(parse_var_literal(cur)?),
        kw if KEYWORDS.contains(&kw) => {
            return Err(SyntaxError::new(start, format!("unexpected `{kw}`")));
        }
        _ => TacUnit::Alias(name),
    };
    Ok(Tactic::Unit(unit))
}

fn parse_var_literal(cur: &mut Cursor) -> Result<String, SyntaxError> {
    cur.expect('"')?;
    let start = cur.offset();
    let mut s = String::new();
    loop {
        match cur.bump() {
            Some('"') => break,
            Some(c) => s.push(c),
            None => return Err(cur.error("unterminated string literal")),
        }
    }
    if !is_var_name(&s) {
        return Err(SyntaxError::new(start, format!("`{s}` is not a variable name")));
    }
    Ok(s)
}

fn parse_thm_list(cur: &mut Cursor) -> Result<ThmList, SyntaxError> {
    if cur.eat(HOLE) {
        return Ok(ThmList::Hole);
    }
    cur.expect('[')?;
    let mut refs = Vec::new();
    if cur.eat(']') {
        return Ok(ThmList::Lit(refs));
    }
    loop {
        refs.push(parse_thm_ref(cur)?);
        if cur.eat(']') {
            return Ok(ThmList::Lit(refs));
        }
        cur.expect(',')?;
    }
}

fn parse_thm_ref(cur: &mut Cursor) -> Result<ThmRef, SyntaxError> {
    let Some(first) = cur.ident() else {
        return Err(cur.error("expected a theorem name"));
    };
    if cur.peek_raw(0) == Some('.')
        && matches!(cur.peek_raw(1), Some(c) if c.is_ascii_alphabetic() || c == '_')
    {
        cur.bump();
        let second = cur.ident().expect("checked identifier start");
        Ok(ThmRef::qualified(first, second))
    } else {
        Ok(ThmRef::bare(first))
    }
}
