//! First-order terms, literals and formulas.
//!
//! Formulas are plain immutable values. Quantifiers range over the constants
//! of whatever state they are evaluated (or mutated) against.

mod eval;
pub mod syntax;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::symbol::Symbol;

pub use eval::{evaluate, evaluate_with};

pub type Args = SmallVec<[Symbol; 3]>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Const(Symbol),
    Var(Symbol),
}

impl Term {
    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }
}

/// A predicate applied to terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub predicate: Symbol,
    pub terms: SmallVec<[Term; 3]>,
}

impl Literal {
    pub fn new(predicate: Symbol, terms: impl IntoIterator<Item = Term>) -> Self {
        Literal {
            predicate,
            terms: terms.into_iter().collect(),
        }
    }

    pub fn is_ground(&self) -> bool {
        self.terms.iter().all(|t| !t.is_var())
    }

    /// Grounds the literal against a binding. Every variable must be bound.
    pub fn ground(&self, binding: &Substitution) -> Result<Atom> {
        let args = ground_terms(&self.terms, |v| binding.get(v))?;
        Ok(Atom {
            predicate: self.predicate,
            args,
        })
    }
}

pub(crate) fn ground_terms(
    terms: &[Term],
    lookup: impl Fn(Symbol) -> Option<Symbol>,
) -> Result<Args> {
    terms
        .iter()
        .map(|t| match *t {
            Term::Const(c) => Ok(c),
            Term::Var(v) => lookup(v)
                .ok_or_else(|| Error::MalformedFormula(format!("unbound variable ?{v}"))),
        })
        .collect()
}

/// A ground literal, i.e. a fact.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub predicate: Symbol,
    pub args: Args,
}

impl Atom {
    pub fn new(predicate: Symbol, args: impl IntoIterator<Item = Symbol>) -> Self {
        Atom {
            predicate,
            args: args.into_iter().collect(),
        }
    }

    pub fn to_literal(&self) -> Literal {
        Literal::new(self.predicate, self.args.iter().map(|&c| Term::Const(c)))
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.predicate)?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(")")
    }
}

/// A ground action: a schema name and its constant arguments.
///
/// Ordering is by schema name then arguments, both lexicographic.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundAction {
    pub schema: Symbol,
    pub args: Args,
}

impl GroundAction {
    pub fn new(schema: Symbol, args: impl IntoIterator<Item = Symbol>) -> Self {
        GroundAction {
            schema,
            args: args.into_iter().collect(),
        }
    }
}

impl fmt::Display for GroundAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.schema)?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(")")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Lit(Literal),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Not(Box<Formula>),
    Exists(Symbol, Box<Formula>),
    Forall(Symbol, Box<Formula>),
    /// True iff the transition's action has this schema and exactly these arguments.
    ActionAtom(Symbol, SmallVec<[Term; 3]>),
    True,
}

impl Formula {
    pub fn lit(predicate: Symbol, terms: impl IntoIterator<Item = Term>) -> Self {
        Formula::Lit(Literal::new(predicate, terms))
    }

    pub fn not(child: Formula) -> Self {
        Formula::Not(Box::new(child))
    }

    pub fn exists(var: Symbol, child: Formula) -> Self {
        Formula::Exists(var, Box::new(child))
    }

    pub fn forall(var: Symbol, child: Formula) -> Self {
        Formula::Forall(var, Box::new(child))
    }

    pub fn action(schema: Symbol, terms: impl IntoIterator<Item = Term>) -> Self {
        Formula::ActionAtom(schema, terms.into_iter().collect())
    }

    /// Variables occurring outside the scope of any binding quantifier.
    pub fn free_variables(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        let mut bound = Vec::new();
        self.collect_free(&mut bound, &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Symbol>, out: &mut BTreeSet<Symbol>) {
        let mut terms = |ts: &[Term], bound: &Vec<Symbol>| {
            for t in ts {
                if let Term::Var(v) = t {
                    if !bound.contains(v) {
                        out.insert(*v);
                    }
                }
            }
        };
        match self {
            Formula::Lit(l) => terms(&l.terms, bound),
            Formula::ActionAtom(_, ts) => terms(ts, bound),
            Formula::True => {}
            Formula::And(cs) | Formula::Or(cs) => {
                for c in cs {
                    c.collect_free(bound, out);
                }
            }
            Formula::Not(c) => c.collect_free(bound, out),
            Formula::Exists(v, c) | Formula::Forall(v, c) => {
                bound.push(*v);
                c.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    fn bound_variables(&self, out: &mut BTreeSet<Symbol>) {
        match self {
            Formula::Lit(_) | Formula::ActionAtom(..) | Formula::True => {}
            Formula::And(cs) | Formula::Or(cs) => cs.iter().for_each(|c| c.bound_variables(out)),
            Formula::Not(c) => c.bound_variables(out),
            Formula::Exists(v, c) | Formula::Forall(v, c) => {
                out.insert(*v);
                c.bound_variables(out);
            }
        }
    }

    /// Replaces the mapped free variables with constants.
    ///
    /// Fails if a mapped variable is re-bound by a quantifier inside `self`.
    pub fn substitute(&self, binding: &Substitution) -> Result<Formula> {
        if binding.is_empty() {
            return Ok(self.clone());
        }
        let mut bound = BTreeSet::new();
        self.bound_variables(&mut bound);
        if let Some(v) = binding.vars().find(|v| bound.contains(v)) {
            return Err(Error::MalformedBinding(format!(
                "?{v} is bound by a quantifier inside the formula"
            )));
        }
        Ok(self.substitute_unchecked(binding))
    }

    fn substitute_unchecked(&self, binding: &Substitution) -> Formula {
        let map_terms = |ts: &SmallVec<[Term; 3]>| -> SmallVec<[Term; 3]> {
            ts.iter()
                .map(|t| match *t {
                    Term::Var(v) => binding.get(v).map_or(*t, Term::Const),
                    c => c,
                })
                .collect()
        };
        match self {
            Formula::Lit(l) => Formula::Lit(Literal {
                predicate: l.predicate,
                terms: map_terms(&l.terms),
            }),
            Formula::ActionAtom(n, ts) => Formula::ActionAtom(*n, map_terms(ts)),
            Formula::True => Formula::True,
            Formula::And(cs) => {
                Formula::And(cs.iter().map(|c| c.substitute_unchecked(binding)).collect())
            }
            Formula::Or(cs) => {
                Formula::Or(cs.iter().map(|c| c.substitute_unchecked(binding)).collect())
            }
            Formula::Not(c) => Formula::not(c.substitute_unchecked(binding)),
            Formula::Exists(v, c) => Formula::exists(*v, c.substitute_unchecked(binding)),
            Formula::Forall(v, c) => Formula::forall(*v, c.substitute_unchecked(binding)),
        }
    }

    /// Checks structural well-formedness: nonempty connectives, no quantifier
    /// re-binding a variable already in scope, and every variable either bound
    /// or listed in `free`.
    pub fn validate(&self, free: &[Symbol]) -> Result<()> {
        let mut scope: Vec<Symbol> = free.to_vec();
        self.validate_in(&mut scope)
    }

    fn validate_in(&self, scope: &mut Vec<Symbol>) -> Result<()> {
        let check_terms = |ts: &[Term], scope: &Vec<Symbol>| -> Result<()> {
            for t in ts {
                if let Term::Var(v) = t {
                    if !scope.contains(v) {
                        return Err(Error::MalformedFormula(format!("unbound variable ?{v}")));
                    }
                }
            }
            Ok(())
        };
        match self {
            Formula::Lit(l) => check_terms(&l.terms, scope),
            Formula::ActionAtom(_, ts) => check_terms(ts, scope),
            Formula::True => Ok(()),
            Formula::And(cs) | Formula::Or(cs) => {
                if cs.is_empty() {
                    return Err(Error::MalformedFormula(
                        "connective with no children".to_string(),
                    ));
                }
                cs.iter().try_for_each(|c| c.validate_in(scope))
            }
            Formula::Not(c) => c.validate_in(scope),
            Formula::Exists(v, c) | Formula::Forall(v, c) => {
                if scope.contains(v) {
                    return Err(Error::MalformedFormula(format!(
                        "quantifier re-binds ?{v}, which is already in scope"
                    )));
                }
                scope.push(*v);
                let r = c.validate_in(scope);
                scope.pop();
                r
            }
        }
    }

    pub fn contains_action_atom(&self) -> bool {
        match self {
            Formula::ActionAtom(..) => true,
            Formula::Lit(_) | Formula::True => false,
            Formula::And(cs) | Formula::Or(cs) => cs.iter().any(Formula::contains_action_atom),
            Formula::Not(c) | Formula::Exists(_, c) | Formula::Forall(_, c) => {
                c.contains_action_atom()
            }
        }
    }

    /// Visits every literal in the formula.
    pub fn for_each_literal<'a>(&'a self, f: &mut impl FnMut(&'a Literal)) {
        match self {
            Formula::Lit(l) => f(l),
            Formula::ActionAtom(..) | Formula::True => {}
            Formula::And(cs) | Formula::Or(cs) => cs.iter().for_each(|c| c.for_each_literal(f)),
            Formula::Not(c) | Formula::Exists(_, c) | Formula::Forall(_, c) => {
                c.for_each_literal(f)
            }
        }
    }
}

/// A mapping from variables to constants.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Substitution(BTreeMap<Symbol, Symbol>);

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(var: Symbol, value: Symbol) -> Self {
        let mut s = Self::new();
        s.bind(var, value);
        s
    }

    pub fn bind(&mut self, var: Symbol, value: Symbol) -> &mut Self {
        self.0.insert(var, value);
        self
    }

    pub fn get(&self, var: Symbol) -> Option<Symbol> {
        self.0.get(&var).copied()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn vars(&self) -> impl Iterator<Item = Symbol> + '_ {
        self.0.keys().copied()
    }
}

impl FromIterator<(Symbol, Symbol)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (Symbol, Symbol)>>(iter: I) -> Self {
        Substitution(iter.into_iter().collect())
    }
}
