//! Relational domains: STRIPS-style action schemas with arbitrary-formula
//! preconditions, grounding and deterministic transitions.

mod file;

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::fol::{evaluate_with, ground_terms, Args, Atom, Formula, GroundAction, Literal, Term};
use crate::reward::{DecisionList, Reward, TerminationValue};
use crate::state::RelState;
use crate::symbol::Symbol;

pub use file::{parse_domain, print_domain};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PredicateDecl {
    pub name: Symbol,
    pub arity: usize,
}

/// A parameterized action template.
#[derive(Clone, Debug, PartialEq)]
pub struct ActionSchema {
    pub name: Symbol,
    pub params: Vec<Symbol>,
    pub precondition: Formula,
    pub add: Vec<Literal>,
    pub del: Vec<Literal>,
    // Top-level conjuncts of the precondition, bucketed by the index of the
    // last parameter they mention (bucket 0 = no parameters).
    stages: Vec<Vec<Formula>>,
}

impl ActionSchema {
    pub fn new(
        name: Symbol,
        params: Vec<Symbol>,
        precondition: Formula,
        add: Vec<Literal>,
        del: Vec<Literal>,
    ) -> Result<Self> {
        let distinct: BTreeSet<_> = params.iter().collect();
        if distinct.len() != params.len() {
            return Err(Error::InvalidDomain(format!("{name}: repeated parameter")));
        }
        precondition
            .validate(&params)
            .map_err(|e| Error::InvalidDomain(format!("{name}: precondition: {e}")))?;
        for l in add.iter().chain(&del) {
            for t in &l.terms {
                match t {
                    Term::Var(v) if params.contains(v) => {}
                    Term::Var(v) => {
                        return Err(Error::InvalidDomain(format!(
                            "{name}: effect mentions ?{v}, which is not a parameter"
                        )))
                    }
                    Term::Const(c) => {
                        return Err(Error::InvalidDomain(format!(
                            "{name}: effect mentions constant {c}; schemas must be fully parameterized"
                        )))
                    }
                }
            }
        }
        if let Some(l) = add.iter().find(|l| del.contains(l)) {
            return Err(Error::InvalidDomain(format!(
                "{name}: literal {} is both added and deleted",
                l.predicate
            )));
        }

        let mut stages = vec![Vec::new(); params.len() + 1];
        let conjuncts: Vec<Formula> = match &precondition {
            Formula::And(cs) => cs.clone(),
            other => vec![other.clone()],
        };
        for c in conjuncts {
            let free = c.free_variables();
            let stage = params
                .iter()
                .rposition(|p| free.contains(p))
                .map_or(0, |i| i + 1);
            stages[stage].push(c);
        }

        Ok(ActionSchema {
            name,
            params,
            precondition,
            add,
            del,
            stages,
        })
    }

    fn ground_effects(&self, lits: &[Literal], args: &[Symbol]) -> Vec<Atom> {
        let lookup = |v: Symbol| self.params.iter().position(|p| *p == v).map(|i| args[i]);
        lits.iter()
            .map(|l| Atom {
                predicate: l.predicate,
                args: ground_terms(&l.terms, lookup).expect("effects are validated"),
            })
            .collect()
    }
}

/// A complete domain: predicates, schemas, reward and termination.
#[derive(Clone, Debug)]
pub struct DomainDef {
    pub name: String,
    pub predicates: Vec<PredicateDecl>,
    pub schemas: Vec<ActionSchema>,
    pub reward: DecisionList,
    pub termination: DecisionList,
    arities: HashMap<Symbol, usize>,
}

impl DomainDef {
    pub fn new(
        name: impl Into<String>,
        predicates: Vec<PredicateDecl>,
        schemas: Vec<ActionSchema>,
        reward: DecisionList,
        termination: DecisionList,
    ) -> Result<Self> {
        let mut arities = HashMap::new();
        for p in &predicates {
            if arities.insert(p.name, p.arity).is_some() {
                return Err(Error::InvalidDomain(format!(
                    "predicate {} declared twice",
                    p.name
                )));
            }
        }
        let mut names = BTreeSet::new();
        for s in &schemas {
            if !names.insert(s.name) {
                return Err(Error::InvalidDomain(format!("schema {} declared twice", s.name)));
            }
        }
        let d = DomainDef {
            name: name.into(),
            predicates,
            schemas,
            reward,
            termination,
            arities,
        };
        for s in &d.schemas {
            d.check_formula(&s.precondition)?;
            for l in s.add.iter().chain(&s.del) {
                d.check_literal(l)?;
            }
        }
        for dl in [&d.reward, &d.termination] {
            for (g, _) in dl.clauses() {
                d.check_formula(g)?;
            }
        }
        for (_, v) in d.termination.clauses() {
            TerminationValue::try_from(*v)?;
        }
        Ok(d)
    }

    pub fn schema(&self, name: Symbol) -> Option<&ActionSchema> {
        self.schemas.iter().find(|s| s.name == name)
    }

    pub fn arity(&self, predicate: Symbol) -> Option<usize> {
        self.arities.get(&predicate).copied()
    }

    fn check_literal(&self, l: &Literal) -> Result<()> {
        match self.arity(l.predicate) {
            Some(n) if n == l.terms.len() => Ok(()),
            Some(n) => Err(Error::InvalidDomain(format!(
                "{} used with {} arguments, declared with {n}",
                l.predicate,
                l.terms.len()
            ))),
            None => Err(Error::InvalidDomain(format!(
                "undeclared predicate {}",
                l.predicate
            ))),
        }
    }

    fn check_formula(&self, f: &Formula) -> Result<()> {
        let mut result = Ok(());
        f.for_each_literal(&mut |l| {
            if result.is_ok() {
                result = self.check_literal(l);
            }
        });
        if result.is_ok() {
            result = self.check_action_atoms(f);
        }
        result
    }

    fn check_action_atoms(&self, f: &Formula) -> Result<()> {
        match f {
            Formula::ActionAtom(n, ts) => match self.schema(*n) {
                Some(s) if s.params.len() == ts.len() => Ok(()),
                Some(_) => Err(Error::InvalidDomain(format!("action atom {n}: wrong arity"))),
                None => Err(Error::InvalidDomain(format!("action atom names unknown schema {n}"))),
            },
            Formula::Lit(_) | Formula::True => Ok(()),
            Formula::And(cs) | Formula::Or(cs) => {
                cs.iter().try_for_each(|c| self.check_action_atoms(c))
            }
            Formula::Not(c) | Formula::Exists(_, c) | Formula::Forall(_, c) => {
                self.check_action_atoms(c)
            }
        }
    }

    /// Checks that every fact uses a declared predicate with the right arity.
    pub fn check_state(&self, s: &RelState) -> Result<()> {
        for f in s.facts() {
            match self.arity(f.predicate) {
                Some(n) if n == f.args.len() => {}
                _ => {
                    return Err(Error::InvalidState(format!(
                        "fact {f} does not match any declared predicate"
                    )))
                }
            }
        }
        Ok(())
    }

    fn resolve<'a>(&'a self, s: &RelState, a: &GroundAction) -> Result<&'a ActionSchema> {
        let schema = self
            .schema(a.schema)
            .ok_or_else(|| Error::MalformedAction(format!("unknown schema in {a}")))?;
        if schema.params.len() != a.args.len() {
            return Err(Error::MalformedAction(format!(
                "{a}: {} expects {} arguments",
                schema.name,
                schema.params.len()
            )));
        }
        if let Some(c) = a.args.iter().find(|c| !s.has_constant(**c)) {
            return Err(Error::MalformedAction(format!("{a}: unknown constant {c}")));
        }
        Ok(schema)
    }

    pub fn is_applicable(&self, s: &RelState, a: &GroundAction) -> Result<bool> {
        let schema = self.resolve(s, a)?;
        let mut env: Vec<(Symbol, Symbol)> =
            schema.params.iter().copied().zip(a.args.iter().copied()).collect();
        evaluate_with(&schema.precondition, s, None, &mut env)
    }

    /// Applies `a`, failing if it is malformed or its precondition does not hold.
    pub fn apply(&self, s: &RelState, a: &GroundAction) -> Result<RelState> {
        if !self.is_applicable(s, a)? {
            return Err(Error::PreconditionViolation(format!("{a} in {s}")));
        }
        let schema = self.resolve(s, a)?;
        Ok(self.apply_unchecked(schema, s, &a.args))
    }

    fn apply_unchecked(&self, schema: &ActionSchema, s: &RelState, args: &[Symbol]) -> RelState {
        let del = schema.ground_effects(&schema.del, args);
        let add = schema.ground_effects(&schema.add, args);
        let mut facts: Vec<Atom> = s
            .facts()
            .iter()
            .filter(|f| !del.contains(f))
            .cloned()
            .collect();
        for a in add {
            if let Err(pos) = facts.binary_search(&a) {
                facts.insert(pos, a);
            }
        }
        s.with_sorted_facts(facts)
    }

    /// Every applicable grounding, in schema declaration order and then
    /// lexicographic argument order.
    pub fn applicable_actions(&self, s: &RelState) -> Vec<GroundAction> {
        let mut out = Vec::new();
        let mut env = Vec::new();
        for schema in &self.schemas {
            if stage_holds(&schema.stages[0], s, &mut env) {
                ground_from(schema, s, 0, &mut env, &mut out);
            }
            debug_assert!(env.is_empty());
        }
        out
    }

    /// Applicable actions paired with their successor states.
    pub fn successors(&self, s: &RelState) -> Vec<(GroundAction, RelState)> {
        self.applicable_actions(s)
            .into_iter()
            .map(|a| {
                let schema = self.schema(a.schema).unwrap();
                let next = self.apply_unchecked(schema, s, &a.args);
                (a, next)
            })
            .collect()
    }

    pub fn reward(&self, s: &RelState, a: &GroundAction, next: &RelState) -> Reward {
        self.reward
            .evaluate(s, a, next)
            .expect("reward guards are validated at load time")
    }

    pub fn terminate(&self, s: &RelState, a: &GroundAction, next: &RelState) -> TerminationValue {
        let v = self
            .termination
            .evaluate(s, a, next)
            .expect("termination guards are validated at load time");
        TerminationValue::try_from(v).expect("termination values are validated at load time")
    }

    /// Termination of a virtual no-op transition at `s`. Guards that need an
    /// action make the list inconclusive, which counts as CONTINUE.
    pub fn initial_termination(&self, s: &RelState) -> TerminationValue {
        for (guard, value) in self.termination.clauses() {
            match evaluate_with(guard, s, None, &mut Vec::new()) {
                Ok(true) => return TerminationValue::try_from(*value).unwrap_or(TerminationValue::Continue),
                Ok(false) => {}
                Err(_) => return TerminationValue::Continue,
            }
        }
        TerminationValue::Continue
    }
}

fn stage_holds(stage: &[Formula], s: &RelState, env: &mut Vec<(Symbol, Symbol)>) -> bool {
    stage.iter().all(|c| {
        evaluate_with(c, s, None, env).expect("preconditions are validated at load time")
    })
}

// Binds parameters left to right, checking each conjunct as soon as all of
// its parameters are bound. Equivalent to filtering the full Cartesian
// product, in the same order.
fn ground_from(
    schema: &ActionSchema,
    s: &RelState,
    depth: usize,
    env: &mut Vec<(Symbol, Symbol)>,
    out: &mut Vec<GroundAction>,
) {
    if depth == schema.params.len() {
        out.push(GroundAction {
            schema: schema.name,
            args: env.iter().map(|(_, c)| *c).collect::<Args>(),
        });
        return;
    }
    for &c in s.constants() {
        env.push((schema.params[depth], c));
        if stage_holds(&schema.stages[depth + 1], s, env) {
            ground_from(schema, s, depth + 1, env, out);
        }
        env.pop();
    }
}
