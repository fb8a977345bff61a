use thiserror::Error;

use super::goal::Goal;
use super::term::{Equation, Symbol, Term};

/// Malformed goal, term or tactic text. `offset` is a 1-based character
/// position; end of input reports one past the last character.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at offset {offset}: {message}")]
pub struct SyntaxError {
    pub offset: usize,
    pub message: String,
}

impl SyntaxError {
    pub fn new(offset: usize, message: impl Into<String>) -> SyntaxError {
        SyntaxError {
            offset,
            message: message.into(),
        }
    }
}

pub(crate) struct Cursor {
    chars: Vec<char>,
    pos: usize,
}

impl Cursor {
    pub(crate) fn new(text: &str) -> Cursor {
        Cursor {
            chars: text.chars().collect(),
            pos: 0,
        }
    }

    pub(crate) fn offset(&self) -> usize {
        self.pos + 1
    }

    pub(crate) fn save(&self) -> usize {
        self.pos
    }

    pub(crate) fn restore(&mut self, pos: usize) {
        self.pos = pos;
    }

    pub(crate) fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    pub(crate) fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    pub(crate) fn peek_raw(&self, ahead: usize) -> Option<char> {
        self.chars.get(self.pos + ahead).copied()
    }

    pub(crate) fn bump(&mut self) -> Option<char> {
        let c = self.chars.get(self.pos).copied();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    pub(crate) fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub(crate) fn eat_str(&mut self, s: &str) -> bool {
        self.skip_ws();
        let n = s.chars().count();
        if self.pos + n <= self.chars.len() && self.chars[self.pos..self.pos + n].iter().copied().eq(s.chars()) {
            self.pos += n;
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, c: char) -> Result<(), SyntaxError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{c}`")))
        }
    }

    pub(crate) fn error(&mut self, message: impl Into<String>) -> SyntaxError {
        self.skip_ws();
        SyntaxError::new(self.offset(), message)
    }

    pub(crate) fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    /// Identifier: letters, digits, `_` and `'`, starting with a letter or `_`.
    pub(crate) fn ident(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        match self.chars.get(self.pos) {
            Some(c) if c.is_ascii_alphabetic() || *c == '_' => {}
            _ => return None,
        }
        while let Some(c) = self.chars.get(self.pos) {
            if c.is_ascii_alphanumeric() || *c == '_' || *c == '\'' {
                self.pos += 1;
            } else {
                break;
            }
        }
        Some(self.chars[start..self.pos].iter().collect())
    }
}

pub fn is_var_name(name: &str) -> bool {
    let mut cs = name.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_lowercase())
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
        && Symbol::from_name(name).is_none()
}

pub(crate) fn parse_term_at(cur: &mut Cursor) -> Result<Term, SyntaxError> {
    cur.skip_ws();
    let start = cur.offset();
    if cur.eat('0') {
        return Ok(Term::zero());
    }
    let Some(name) = cur.ident() else {
        return Err(cur.error("expected a term"));
    };
    match Symbol::from_name(&name) {
        Some(sym) if sym.arity() == 0 => {
            if cur.peek() == Some('(') {
                return Err(cur.error(format!("`{name}` takes no arguments")));
            }
            Ok(Term::constant(sym))
        }
        Some(sym) => {
            cur.expect('(')?;
            let mut args = vec![parse_term_at(cur)?];
            while cur.eat(',') {
                args.push(parse_term_at(cur)?);
            }
            cur.expect(')')?;
            if args.len() != sym.arity() {
                return Err(SyntaxError::new(
                    start,
                    format!("`{name}` expects {} argument(s), got {}", sym.arity(), args.len()),
                ));
            }
            Ok(Term::App(sym, args))
        }
        None if is_var_name(&name) => {
            if cur.peek() == Some('(') {
                return Err(cur.error(format!("unknown function symbol `{name}`")));
            }
            Ok(Term::Var(name))
        }
        None => Err(SyntaxError::new(start, format!("invalid variable name `{name}`"))),
    }
}

fn parse_equation_at(cur: &mut Cursor) -> Result<Equation, SyntaxError> {
    let lhs = parse_term_at(cur)?;
    cur.expect('=')?;
    let rhs = parse_term_at(cur)?;
    Ok(Equation::new(lhs, rhs))
}

pub(crate) fn parse_goal_at(cur: &mut Cursor) -> Result<Goal, SyntaxError> {
    if cur.eat_str("|-") {
        let concl = parse_equation_at(cur)?;
        return Ok(Goal::trivial(concl));
    }
    let mut eqs = vec![parse_equation_at(cur)?];
    while cur.eat(',') {
        eqs.push(parse_equation_at(cur)?);
    }
    if cur.eat_str("|-") {
        let concl = parse_equation_at(cur)?;
        Ok(Goal::new(eqs, concl))
    } else if eqs.len() == 1 {
        Ok(Goal::trivial(eqs.pop().unwrap()))
    } else {
        Err(cur.error("expected `|-` after hypotheses"))
    }
}

pub fn parse_term(text: &str) -> Result<Term, SyntaxError> {
    let mut cur = Cursor::new(text);
    let t = parse_term_at(&mut cur)?;
    if !cur.at_end() {
        return Err(cur.error("trailing input"));
    }
    Ok(t)
}

/// Parses `[eq ("," eq)* "|-"] eq`.
pub fn parse_goal(text: &str) -> Result<Goal, SyntaxError> {
    let mut cur = Cursor::new(text);
    let g = parse_goal_at(&mut cur)?;
    if !cur.at_end() {
        return Err(cur.error("trailing input"));
    }
    Ok(g)
}
