//! The s-expression surface syntax shared by formulas, states and domain files.
//!
//! ```text
//! (and f ...)  (or f ...)  (not f)  (exists ?X f)  (forall ?X f)
//! (lit Name t ...)  (action Name t ...)  true
//! ```
//!
//! Variables carry a `?` prefix; everything else is a constant. `;` starts a
//! comment that runs to the end of the line.

use std::fmt::{self, Write as _};

use super::{Atom, Formula, Literal, Term};
use crate::error::{Error, Result};
use crate::state::RelState;
use crate::symbol::{is_identifier, sym, Symbol};

#[derive(Clone, Debug, PartialEq)]
pub enum Sexp {
    Atom { text: String, line: usize, col: usize },
    List { items: Vec<Sexp>, line: usize, col: usize },
}

impl Sexp {
    pub fn position(&self) -> (usize, usize) {
        match self {
            Sexp::Atom { line, col, .. } | Sexp::List { line, col, .. } => (*line, *col),
        }
    }

    pub fn error<T>(&self, msg: impl Into<String>) -> Result<T> {
        let (line, col) = self.position();
        Err(Error::Parse {
            line,
            col,
            msg: msg.into(),
        })
    }

    pub fn as_atom(&self) -> Result<&str> {
        match self {
            Sexp::Atom { text, .. } => Ok(text),
            Sexp::List { .. } => self.error("expected an identifier, found a list"),
        }
    }

    pub fn as_list(&self) -> Result<&[Sexp]> {
        match self {
            Sexp::List { items, .. } => Ok(items),
            Sexp::Atom { text, .. } => self.error(format!("expected a list, found `{text}`")),
        }
    }

    /// For a list whose head is an identifier: the head and the remaining items.
    pub fn tagged(&self) -> Result<(&str, &[Sexp])> {
        let items = self.as_list()?;
        match items.split_first() {
            Some((head, rest)) => Ok((head.as_atom()?, rest)),
            None => self.error("empty list"),
        }
    }

    pub fn expect_tag(&self, tag: &str) -> Result<&[Sexp]> {
        let (head, rest) = self.tagged()?;
        if head != tag {
            return self.error(format!("expected `({tag} ...)`, found `({head} ...)`"));
        }
        Ok(rest)
    }
}

/// Reads every top-level s-expression in `src`.
pub fn read_all(src: &str) -> Result<Vec<Sexp>> {
    let mut stack: Vec<(Vec<Sexp>, usize, usize)> = Vec::new();
    let mut out = Vec::new();
    let mut chars = src.char_indices().peekable();
    let (mut line, mut col) = (1usize, 0usize);
    let mut token = String::new();
    let mut token_pos = (0, 0);

    fn flush(
        token: &mut String,
        pos: (usize, usize),
        stack: &mut [(Vec<Sexp>, usize, usize)],
        out: &mut Vec<Sexp>,
    ) {
        if token.is_empty() {
            return;
        }
        let atom = Sexp::Atom {
            text: std::mem::take(token),
            line: pos.0,
            col: pos.1,
        };
        match stack.last_mut() {
            Some((items, _, _)) => items.push(atom),
            None => out.push(atom),
        }
    }

    while let Some((_, c)) = chars.next() {
        col += 1;
        match c {
            ';' => {
                flush(&mut token, token_pos, &mut stack, &mut out);
                for (_, c) in chars.by_ref() {
                    if c == '\n' {
                        line += 1;
                        col = 0;
                        break;
                    }
                }
            }
            '(' => {
                flush(&mut token, token_pos, &mut stack, &mut out);
                stack.push((Vec::new(), line, col));
            }
            ')' => {
                flush(&mut token, token_pos, &mut stack, &mut out);
                let (items, l, c0) = stack.pop().ok_or(Error::Parse {
                    line,
                    col,
                    msg: "unbalanced `)`".to_string(),
                })?;
                let list = Sexp::List {
                    items,
                    line: l,
                    col: c0,
                };
                match stack.last_mut() {
                    Some((parent, _, _)) => parent.push(list),
                    None => out.push(list),
                }
            }
            c if c.is_whitespace() => {
                flush(&mut token, token_pos, &mut stack, &mut out);
                if c == '\n' {
                    line += 1;
                    col = 0;
                }
            }
            c => {
                if token.is_empty() {
                    token_pos = (line, col);
                }
                token.push(c);
            }
        }
    }
    flush(&mut token, token_pos, &mut stack, &mut out);
    if let Some((_, l, c)) = stack.last() {
        return Err(Error::Parse {
            line: *l,
            col: *c,
            msg: "unclosed `(`".to_string(),
        });
    }
    Ok(out)
}

/// Reads exactly one s-expression.
pub fn read_one(src: &str) -> Result<Sexp> {
    let mut all = read_all(src)?;
    match all.len() {
        1 => Ok(all.pop().unwrap()),
        0 => Err(Error::Parse {
            line: 1,
            col: 1,
            msg: "empty input".to_string(),
        }),
        _ => all[1].error("trailing input after the first expression"),
    }
}

pub fn parse_term(s: &Sexp) -> Result<Term> {
    let text = s.as_atom()?;
    if let Some(v) = text.strip_prefix('?') {
        if !is_identifier(v) {
            return s.error(format!("bad variable name `{text}`"));
        }
        Ok(Term::Var(sym(v)))
    } else if is_identifier(text) {
        Ok(Term::Const(sym(text)))
    } else {
        s.error(format!("bad term `{text}`"))
    }
}

pub fn parse_identifier(s: &Sexp) -> Result<Symbol> {
    let text = s.as_atom()?;
    if !is_identifier(text) {
        return s.error(format!("bad identifier `{text}`"));
    }
    Ok(sym(text))
}

fn parse_variable(s: &Sexp) -> Result<Symbol> {
    match parse_term(s)? {
        Term::Var(v) => Ok(v),
        Term::Const(c) => s.error(format!("expected a variable, found constant `{c}`")),
    }
}

/// Parses a `(lit Name t ...)` expression.
pub fn parse_literal(s: &Sexp) -> Result<Literal> {
    let rest = s.expect_tag("lit")?;
    let (name, terms) = rest
        .split_first()
        .map_or_else(|| s.error("`lit` needs a predicate name"), Ok)?;
    Ok(Literal {
        predicate: parse_identifier(name)?,
        terms: terms.iter().map(parse_term).collect::<Result<_>>()?,
    })
}

pub fn parse_formula_sexp(s: &Sexp) -> Result<Formula> {
    if let Sexp::Atom { text, .. } = s {
        return if text == "true" {
            Ok(Formula::True)
        } else {
            s.error(format!("unexpected `{text}` where a formula was expected"))
        };
    }
    let (head, rest) = s.tagged()?;
    match head {
        "and" | "or" => {
            if rest.is_empty() {
                return s.error(format!("`{head}` needs at least one child"));
            }
            let cs = rest.iter().map(parse_formula_sexp).collect::<Result<Vec<_>>>()?;
            Ok(if head == "and" {
                Formula::And(cs)
            } else {
                Formula::Or(cs)
            })
        }
        "not" => match rest {
            [c] => Ok(Formula::not(parse_formula_sexp(c)?)),
            _ => s.error("`not` takes exactly one child"),
        },
        "exists" | "forall" => match rest {
            [v, body] => {
                let v = parse_variable(v)?;
                let body = parse_formula_sexp(body)?;
                Ok(if head == "exists" {
                    Formula::exists(v, body)
                } else {
                    Formula::forall(v, body)
                })
            }
            _ => s.error(format!("`{head}` takes a variable and a body")),
        },
        "lit" => Ok(Formula::Lit(parse_literal(s)?)),
        "action" => {
            let (name, terms) = rest
                .split_first()
                .map_or_else(|| s.error("`action` needs a schema name"), Ok)?;
            Ok(Formula::ActionAtom(
                parse_identifier(name)?,
                terms.iter().map(parse_term).collect::<Result<_>>()?,
            ))
        }
        other => s.error(format!("unknown formula head `{other}`")),
    }
}

pub fn parse_formula(src: &str) -> Result<Formula> {
    parse_formula_sexp(&read_one(src)?)
}

/// Parses a ground `(lit Name c ...)` expression.
pub fn parse_atom(s: &Sexp) -> Result<Atom> {
    let l = parse_literal(s)?;
    let mut args = super::Args::new();
    for t in &l.terms {
        match t {
            Term::Const(c) => args.push(*c),
            Term::Var(v) => return s.error(format!("fact contains variable ?{v}")),
        }
    }
    Ok(Atom {
        predicate: l.predicate,
        args,
    })
}

/// `(state (constants c ...) (facts (lit P c ...) ...))`
pub fn parse_state_sexp(s: &Sexp) -> Result<RelState> {
    let rest = s.expect_tag("state")?;
    let mut constants = Vec::new();
    let mut facts = Vec::new();
    for part in rest {
        let (head, items) = part.tagged()?;
        match head {
            "constants" => {
                for c in items {
                    constants.push(parse_identifier(c)?);
                }
            }
            "facts" => {
                for f in items {
                    facts.push(parse_atom(f)?);
                }
            }
            other => return part.error(format!("unknown state section `{other}`")),
        }
    }
    RelState::new(constants, facts)
}

pub fn parse_state(src: &str) -> Result<RelState> {
    parse_state_sexp(&read_one(src)?)
}

fn write_term(out: &mut String, t: &Term) {
    match t {
        Term::Const(c) => out.push_str(c),
        Term::Var(v) => {
            out.push('?');
            out.push_str(v);
        }
    }
}

fn write_formula(out: &mut String, f: &Formula) {
    match f {
        Formula::True => out.push_str("true"),
        Formula::Lit(l) => {
            out.push_str("(lit ");
            out.push_str(&l.predicate);
            for t in &l.terms {
                out.push(' ');
                write_term(out, t);
            }
            out.push(')');
        }
        Formula::ActionAtom(n, ts) => {
            out.push_str("(action ");
            out.push_str(n);
            for t in ts {
                out.push(' ');
                write_term(out, t);
            }
            out.push(')');
        }
        Formula::And(cs) | Formula::Or(cs) => {
            out.push_str(if matches!(f, Formula::And(_)) {
                "(and"
            } else {
                "(or"
            });
            for c in cs {
                out.push(' ');
                write_formula(out, c);
            }
            out.push(')');
        }
        Formula::Not(c) => {
            out.push_str("(not ");
            write_formula(out, c);
            out.push(')');
        }
        Formula::Exists(v, c) | Formula::Forall(v, c) => {
            out.push_str(if matches!(f, Formula::Exists(..)) {
                "(exists ?"
            } else {
                "(forall ?"
            });
            out.push_str(v);
            out.push(' ');
            write_formula(out, c);
            out.push(')');
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_formula(&mut s, self);
        f.write_str(&s)
    }
}

pub fn atom_to_sexp(a: &Atom) -> String {
    let mut s = format!("(lit {}", a.predicate);
    for x in &a.args {
        let _ = write!(s, " {x}");
    }
    s.push(')');
    s
}

/// Prints a state in the format read by [`parse_state`].
pub fn print_state(s: &RelState) -> String {
    let mut out = String::from("(state\n  (constants");
    for c in s.constants() {
        let _ = write!(out, " {c}");
    }
    out.push_str(")\n  (facts");
    for f in s.facts() {
        out.push_str("\n    ");
        out.push_str(&atom_to_sexp(f));
    }
    out.push_str("))\n");
    out
}
