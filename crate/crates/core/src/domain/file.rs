//! Reading and writing domain files.
//!
//! ```text
//! (domain blocks
//!   (predicates OnTable/1 On/2 Clear/1 Holding/1 HandEmpty/0)
//!   (action Pick (params ?X)
//!     (pre (and (lit OnTable ?X) (lit Clear ?X) (lit HandEmpty)))
//!     (add (lit Holding ?X))
//!     (del (lit OnTable ?X) (lit Clear ?X) (lit HandEmpty)))
//!   (reward (over next) (when (forall ?X (lit OnTable ?X)) 1) (else 0))
//!   (termination (over next) (when (forall ?X (lit OnTable ?X)) success) (else continue)))
//! ```

use std::fmt::Write as _;

use super::{ActionSchema, DomainDef, PredicateDecl};
use crate::error::Result;
use crate::fol::syntax::{parse_formula_sexp, parse_identifier, parse_literal, read_one, Sexp};
use crate::fol::{Formula, Literal, Term};
use crate::reward::{DecisionList, EvalOver, Reward, TerminationValue};
use crate::symbol::sym;

pub fn parse_domain(src: &str) -> Result<DomainDef> {
    let top = read_one(src)?;
    let rest = top.expect_tag("domain")?;
    let (name, sections) = rest
        .split_first()
        .map_or_else(|| top.error("domain needs a name"), Ok)?;
    let name = parse_identifier(name)?;

    let mut predicates = Vec::new();
    let mut schemas = Vec::new();
    let mut reward = None;
    let mut termination = None;
    for sec in sections {
        let (head, items) = sec.tagged()?;
        match head {
            "predicates" => {
                for p in items {
                    predicates.push(parse_predicate_decl(p)?);
                }
            }
            "action" => schemas.push(parse_schema(sec)?),
            "reward" => reward = Some(parse_decision_list(sec, parse_reward_value)?),
            "termination" => termination = Some(parse_decision_list(sec, parse_termination_value)?),
            other => return sec.error(format!("unknown domain section `{other}`")),
        }
    }
    let reward = reward.map_or_else(|| top.error("domain has no reward section"), Ok)?;
    let termination =
        termination.map_or_else(|| top.error("domain has no termination section"), Ok)?;
    DomainDef::new(name.as_str(), predicates, schemas, reward, termination)
}

fn parse_predicate_decl(s: &Sexp) -> Result<PredicateDecl> {
    let text = s.as_atom()?;
    let (name, arity) = text
        .rsplit_once('/')
        .map_or_else(|| s.error(format!("expected Name/arity, found `{text}`")), Ok)?;
    let arity = arity
        .parse()
        .map_or_else(|_| s.error(format!("bad arity in `{text}`")), Ok)?;
    if !crate::symbol::is_identifier(name) {
        return s.error(format!("bad predicate name `{name}`"));
    }
    Ok(PredicateDecl {
        name: sym(name),
        arity,
    })
}

fn parse_schema(s: &Sexp) -> Result<ActionSchema> {
    let rest = s.expect_tag("action")?;
    let (name, parts) = rest
        .split_first()
        .map_or_else(|| s.error("action needs a name"), Ok)?;
    let name = parse_identifier(name)?;
    let mut params = Vec::new();
    let mut pre = Formula::True;
    let mut add = Vec::new();
    let mut del = Vec::new();
    for part in parts {
        let (head, items) = part.tagged()?;
        match head {
            "params" => {
                for p in items {
                    match crate::fol::syntax::parse_term(p)? {
                        Term::Var(v) => params.push(v),
                        Term::Const(c) => return p.error(format!("parameter `{c}` must start with ?")),
                    }
                }
            }
            "pre" => match items {
                [f] => pre = parse_formula_sexp(f)?,
                _ => return part.error("`pre` takes exactly one formula"),
            },
            "add" => add = items.iter().map(parse_literal).collect::<Result<_>>()?,
            "del" => del = items.iter().map(parse_literal).collect::<Result<_>>()?,
            other => return part.error(format!("unknown action section `{other}`")),
        }
    }
    ActionSchema::new(name, params, pre, add, del)
}

fn parse_reward_value(s: &Sexp) -> Result<Reward> {
    let text = s.as_atom()?;
    let parsed = match text.split_once('/') {
        Some((n, d)) => n.parse::<i64>().ok().zip(d.parse::<i64>().ok()).and_then(|(n, d)| {
            (d != 0).then(|| Reward::new(n, d))
        }),
        None => text.parse::<i64>().ok().map(Reward::from_integer),
    };
    parsed.map_or_else(|| s.error(format!("bad reward value `{text}`")), Ok)
}

fn parse_termination_value(s: &Sexp) -> Result<Reward> {
    let v = match s.as_atom()? {
        "success" => TerminationValue::Success,
        "continue" => TerminationValue::Continue,
        "failure" => TerminationValue::Failure,
        other => return s.error(format!("bad termination value `{other}`")),
    };
    Ok(Reward::from_integer(v.as_i8().into()))
}

fn parse_decision_list(s: &Sexp, value: fn(&Sexp) -> Result<Reward>) -> Result<DecisionList> {
    let (_, items) = s.tagged()?;
    let mut over = EvalOver::Next;
    let mut clauses = Vec::new();
    let mut seen_else = false;
    for item in items {
        let (head, rest) = item.tagged()?;
        if seen_else {
            return item.error("clauses after `else` are unreachable");
        }
        match (head, rest) {
            ("over", [w]) => {
                over = match w.as_atom()? {
                    "next" => EvalOver::Next,
                    "prior" => EvalOver::Prior,
                    other => return w.error(format!("`over` must be next or prior, found `{other}`")),
                }
            }
            ("when", [f, v]) => clauses.push((parse_formula_sexp(f)?, value(v)?)),
            ("else", [v]) => {
                clauses.push((Formula::True, value(v)?));
                seen_else = true;
            }
            _ => return item.error(format!("malformed `{head}` clause")),
        }
    }
    DecisionList::new(clauses, over)
}

fn write_literals(out: &mut String, tag: &str, lits: &[Literal]) {
    let _ = write!(out, "\n    ({tag}");
    for l in lits {
        let _ = write!(out, " {}", Formula::Lit(l.clone()));
    }
    out.push(')');
}

fn write_decision_list(out: &mut String, tag: &str, dl: &DecisionList, termination: bool) {
    let over = match dl.eval_over() {
        EvalOver::Next => "next",
        EvalOver::Prior => "prior",
    };
    let _ = write!(out, "\n  ({tag} (over {over})");
    let show = |v: &Reward| -> String {
        if termination {
            match TerminationValue::try_from(*v) {
                Ok(t) => t.to_string().to_lowercase(),
                Err(_) => v.to_string(),
            }
        } else {
            v.to_string()
        }
    };
    for (g, v) in dl.clauses() {
        if *g == Formula::True {
            let _ = write!(out, "\n    (else {})", show(v));
        } else {
            let _ = write!(out, "\n    (when {g} {})", show(v));
        }
    }
    out.push(')');
}

/// Prints a domain in the format read by [`parse_domain`].
pub fn print_domain(d: &DomainDef) -> String {
    let mut out = format!("(domain {}\n  (predicates", d.name);
    for p in &d.predicates {
        let _ = write!(out, " {}/{}", p.name, p.arity);
    }
    out.push(')');
    for s in &d.schemas {
        let _ = write!(out, "\n  (action {}\n    (params", s.name);
        for p in &s.params {
            let _ = write!(out, " ?{p}");
        }
        let _ = write!(out, ")\n    (pre {})", s.precondition);
        write_literals(&mut out, "add", &s.add);
        write_literals(&mut out, "del", &s.del);
        out.push(')');
    }
    write_decision_list(&mut out, "reward", &d.reward, false);
    write_decision_list(&mut out, "termination", &d.termination, true);
    out.push_str(")\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envs::{bins, blocks, drawers};
    use crate::error::Error;

    #[test]
    fn builtin_domains_round_trip() {
        for d in [blocks::domain(), bins::domain(), drawers::domain()] {
            let text = print_domain(&d);
            let again = parse_domain(&text).unwrap();
            assert_eq!(again.name, d.name);
            assert_eq!(again.predicates, d.predicates);
            assert_eq!(again.schemas, d.schemas);
            assert_eq!(again.reward, d.reward);
            assert_eq!(again.termination, d.termination);
            assert_eq!(print_domain(&again), text);
        }
    }

    #[test]
    fn rejects_bad_domains() {
        let base = |extra: &str, reward: &str| {
            format!(
                "(domain t (predicates P/1)
                   {extra}
                   (reward (over next) {reward})
                   (termination (over next) (else continue)))"
            )
        };
        assert!(parse_domain(&base("", "(else 0)")).is_ok());
        // undeclared predicate
        assert!(matches!(
            parse_domain(&base("", "(when (lit Q a) 1) (else 0)")),
            Err(Error::InvalidDomain(_))
        ));
        // wrong arity
        assert!(parse_domain(&base("", "(when (lit P a b) 1) (else 0)")).is_err());
        // no else
        assert!(parse_domain(&base("", "(when (lit P a) 1)")).is_err());
        // unknown section
        assert!(matches!(
            parse_domain(&base("(bogus)", "(else 0)")),
            Err(Error::Parse { .. })
        ));
        // free variable outside params
        assert!(parse_domain(&base(
            "(action A (params ?X) (pre (lit P ?Y)) (add) (del))",
            "(else 0)"
        ))
        .is_err());
        // action atom naming a missing schema
        assert!(parse_domain(&base("", "(when (action Z a) 1) (else 0)")).is_err());
    }

    #[test]
    fn rational_rewards_parse() {
        let d = parse_domain(
            "(domain t (predicates P/1)
               (reward (over prior) (when (lit P a) 3/2) (else -1))
               (termination (over next) (else continue)))",
        )
        .unwrap();
        assert_eq!(d.reward.max_value(), Reward::new(3, 2));
        assert_eq!(d.reward.min_value(), Reward::from_integer(-1));
        assert_eq!(d.reward.eval_over(), EvalOver::Prior);
    }

    #[test]
    fn termination_values_are_restricted() {
        assert!(parse_domain(
            "(domain t (predicates P/1)
               (reward (over next) (else 0))
               (termination (over next) (when (lit P a) 2) (else continue)))",
        )
        .is_err());
    }
}
