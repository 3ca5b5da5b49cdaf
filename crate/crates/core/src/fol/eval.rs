use smallvec::SmallVec;

use super::{Formula, GroundAction, Term};
use crate::error::{Error, Result};
use crate::state::RelState;
use crate::symbol::Symbol;

/// Evaluates `f` over `state`. Quantifiers range over the state's constants;
/// action atoms are checked against `action`.
pub fn evaluate(f: &Formula, state: &RelState, action: Option<&GroundAction>) -> Result<bool> {
    evaluate_with(f, state, action, &mut Vec::new())
}

/// Like [`evaluate`], with an explicit stack of variable bindings; the
/// innermost binding of a variable wins.
pub fn evaluate_with(
    f: &Formula,
    state: &RelState,
    action: Option<&GroundAction>,
    env: &mut Vec<(Symbol, Symbol)>,
) -> Result<bool> {
    match f {
        Formula::True => Ok(true),
        Formula::Lit(l) => {
            let args = resolve(&l.terms, env)?;
            Ok(state.holds(l.predicate, &args))
        }
        Formula::ActionAtom(name, terms) => {
            let args = resolve(terms, env)?;
            let a = action.ok_or_else(|| Error::MissingContext(name.to_string()))?;
            Ok(a.schema == *name && a.args.as_slice() == args.as_slice())
        }
        Formula::Not(c) => Ok(!evaluate_with(c, state, action, env)?),
        Formula::And(cs) => {
            for c in cs {
                if !evaluate_with(c, state, action, env)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Formula::Or(cs) => {
            for c in cs {
                if evaluate_with(c, state, action, env)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        Formula::Exists(v, c) => quantify(*v, c, state, action, env, true),
        Formula::Forall(v, c) => quantify(*v, c, state, action, env, false),
    }
}

fn quantify(
    var: Symbol,
    body: &Formula,
    state: &RelState,
    action: Option<&GroundAction>,
    env: &mut Vec<(Symbol, Symbol)>,
    existential: bool,
) -> Result<bool> {
    // Exists short-circuits on the first true binding, Forall on the first false.
    for &c in state.constants() {
        env.push((var, c));
        let r = evaluate_with(body, state, action, env);
        env.pop();
        if r? == existential {
            return Ok(existential);
        }
    }
    Ok(!existential)
}

fn resolve(terms: &[Term], env: &[(Symbol, Symbol)]) -> Result<SmallVec<[Symbol; 3]>> {
    terms
        .iter()
        .map(|t| match *t {
            Term::Const(c) => Ok(c),
            Term::Var(v) => env
                .iter()
                .rev()
                .find(|(k, _)| *k == v)
                .map(|&(_, c)| c)
                .ok_or_else(|| Error::MalformedFormula(format!("unbound variable ?{v}"))),
        })
        .collect()
}
