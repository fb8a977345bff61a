use thiserror::Error;

use crate::goalsys::{parse_goal_at, parse_tactic_at, Cursor, Goal, SyntaxError, Tactic};

/// Script error located by 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ScriptError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decl {
    Theory {
        name: String,
        line: usize,
    },
    Alias {
        name: String,
        body: Tactic,
        line: usize,
    },
    Theorem {
        name: String,
        statement: Goal,
        proof: Tactic,
        line: usize,
    },
}

/// Blanks out `-- ...` comments, keeping every other character in place so
/// offsets still map to the original text.
fn strip_comments(text: &str) -> String {
    text.split('\n')
        .map(|l| match l.find("--") {
            Some(i) => format!("{}{}", &l[..i], " ".repeat(l[i..].chars().count())),
            None => l.to_string(),
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn locate(text: &str, offset: usize) -> (usize, usize) {
    let mut line = 1;
    let mut col = 1;
    for c in text.chars().take(offset.saturating_sub(1)) {
        if c == '\n' {
            line += 1;
            col = 1;
        } else {
            col += 1;
        }
    }
    (line, col)
}

/// Parses a corpus script:
///
/// ```text
/// theory <id>
/// def <ID> = <tactic>
/// theorem <id> : <goal> := <tactic> .
/// ```
///
/// `--` starts a comment running to the end of the line.
pub fn parse_script(text: &str) -> Result<Vec<Decl>, ScriptError> {
    let clean = strip_comments(text);
    let mut cur = Cursor::new(&clean);
    let to_err = |e: SyntaxError| {
        let (line, column) = locate(&clean, e.offset);
        ScriptError {
            line,
            column,
            message: e.message,
        }
    };
    let mut decls = Vec::new();
    while !cur.at_end() {
        let line = locate(&clean, cur.offset()).0;
        let start = cur.offset();
        let kw = cur.ident();
        match kw.as_deref() {
            Some("theory") => {
                let name = cur.ident().ok_or_else(|| to_err(cur.error("expected a theory name")))?;
                decls.push(Decl::Theory { name, line });
            }
            Some("def") => {
                let name = cur.ident().ok_or_else(|| to_err(cur.error("expected an alias name")))?;
                cur.expect('=').map_err(to_err)?;
                let body = parse_tactic_at(&mut cur).map_err(to_err)?;
                decls.push(Decl::Alias { name, body, line });
            }
            Some("theorem") => {
                let name = cur.ident().ok_or_else(|| to_err(cur.error("expected a theorem name")))?;
                cur.expect(':').map_err(to_err)?;
                let statement = parse_goal_at(&mut cur).map_err(to_err)?;
                if !cur.eat_str(":=") {
                    return Err(to_err(cur.error("expected `:=`")));
                }
                let proof = parse_tactic_at(&mut cur).map_err(to_err)?;
                if !cur.eat('.') {
                    return Err(to_err(cur.error("unterminated proof: expected `.`")));
                }
                decls.push(Decl::Theorem {
                    name,
                    statement,
                    proof,
                    line,
                });
            }
            _ => {
                return Err(to_err(SyntaxError::new(
                    start,
                    "expected `theory`, `def` or `theorem`",
                )))
            }
        }
    }
    Ok(decls)
}
