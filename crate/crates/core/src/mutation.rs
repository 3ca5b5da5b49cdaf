//! State mutation: the sets of minimal literal changes (plus an optional
//! final action) that make a formula true or false.

use std::collections::{HashMap, HashSet};
use std::fmt::{self, Write as _};

use crate::domain::DomainDef;
use crate::error::{Error, Result};
use crate::fol::{ground_terms, Args, Atom, Formula, GroundAction, Term};
use crate::state::RelState;
use crate::symbol::Symbol;

pub const DEFAULT_MUTATION_CAP: usize = 10_000;

/// Which predicates some action can add, and which it can delete.
#[derive(Clone, Debug, Default)]
pub struct MutabilityIndex {
    addable: HashSet<Symbol>,
    deletable: HashSet<Symbol>,
    preconditions: HashMap<Symbol, (Vec<Symbol>, Formula)>,
}

impl MutabilityIndex {
    pub fn new(d: &DomainDef) -> Self {
        let mut idx = MutabilityIndex::default();
        for s in &d.schemas {
            idx.addable.extend(s.add.iter().map(|l| l.predicate));
            idx.deletable.extend(s.del.iter().map(|l| l.predicate));
            idx.preconditions
                .insert(s.name, (s.params.clone(), s.precondition.clone()));
        }
        idx
    }

    /// An index with explicit mutability flags and no schema preconditions.
    pub fn from_flags(
        addable: impl IntoIterator<Item = Symbol>,
        deletable: impl IntoIterator<Item = Symbol>,
    ) -> Self {
        MutabilityIndex {
            addable: addable.into_iter().collect(),
            deletable: deletable.into_iter().collect(),
            preconditions: HashMap::new(),
        }
    }

    pub fn can_become_true(&self, predicate: Symbol) -> bool {
        self.addable.contains(&predicate)
    }

    pub fn can_become_false(&self, predicate: Symbol) -> bool {
        self.deletable.contains(&predicate)
    }
}

/// Literal and action constraints on the transition that realizes a milestone.
///
/// All collections are sorted and deduplicated.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Constraints {
    pub make_true: Vec<Atom>,
    pub make_false: Vec<Atom>,
    pub required_action: Option<GroundAction>,
    pub forbidden_actions: Vec<GroundAction>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mutation {
    /// The formula holds now and no action can falsify it.
    ImmutablyValid,
    Constrain(Constraints),
}

impl Mutation {
    pub fn make_true(atoms: impl IntoIterator<Item = Atom>) -> Self {
        Mutation::Constrain(Constraints {
            make_true: sorted(atoms),
            ..Constraints::default()
        })
    }

    pub fn make_false(atoms: impl IntoIterator<Item = Atom>) -> Self {
        Mutation::Constrain(Constraints {
            make_false: sorted(atoms),
            ..Constraints::default()
        })
    }

    pub fn require(action: GroundAction) -> Self {
        Mutation::Constrain(Constraints {
            required_action: Some(action),
            ..Constraints::default()
        })
    }

    pub fn forbid(action: GroundAction) -> Self {
        Mutation::Constrain(Constraints {
            forbidden_actions: vec![action],
            ..Constraints::default()
        })
    }

    pub fn constraints(&self) -> Option<&Constraints> {
        match self {
            Mutation::ImmutablyValid => None,
            Mutation::Constrain(c) => Some(c),
        }
    }

    pub fn required_action(&self) -> Option<&GroundAction> {
        self.constraints().and_then(|c| c.required_action.as_ref())
    }

    /// True when `state` meets the literal constraints and `action` (if any)
    /// meets the action constraints.
    pub fn is_satisfied(&self, state: &RelState, action: Option<&GroundAction>) -> bool {
        let c = match self {
            Mutation::ImmutablyValid => return true,
            Mutation::Constrain(c) => c,
        };
        c.make_true.iter().all(|a| state.contains(a))
            && !c.make_false.iter().any(|a| state.contains(a))
            && match (&c.required_action, action) {
                (None, _) => true,
                (Some(r), Some(a)) => r == a,
                (Some(_), None) => false,
            }
            && action.is_none_or(|a| c.forbidden_actions.binary_search(a).is_err())
    }
}

impl fmt::Display for Mutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Mutation::ImmutablyValid => return f.write_str("IMMUTABLY_VALID"),
            Mutation::Constrain(c) => c,
        };
        let mut parts = Vec::new();
        parts.extend(c.make_true.iter().map(|a| format!("+{a}")));
        parts.extend(c.make_false.iter().map(|a| format!("-{a}")));
        parts.extend(c.required_action.iter().map(|a| format!("@{a}")));
        parts.extend(c.forbidden_actions.iter().map(|a| format!("!@{a}")));
        if parts.is_empty() {
            return f.write_str("{}");
        }
        f.write_str(&parts.join(" "))
    }
}

/// One mutation per line, in canonical order.
pub fn dump_mutations(ms: &[Mutation]) -> String {
    let mut lines: Vec<String> = ms.iter().map(|m| m.to_string()).collect();
    lines.sort();
    let mut out = String::new();
    for l in lines {
        let _ = writeln!(out, "{l}");
    }
    out
}

/// `|make_true \ s| + |make_false ∩ s| + [required action present]`.
pub fn literal_count_heuristic(state: &RelState, m: &Mutation) -> usize {
    match m {
        Mutation::ImmutablyValid => 0,
        Mutation::Constrain(c) => {
            c.make_true.iter().filter(|a| !state.contains(a)).count()
                + c.make_false.iter().filter(|a| state.contains(a)).count()
                + usize::from(c.required_action.is_some())
        }
    }
}

fn sorted<T: Ord>(xs: impl IntoIterator<Item = T>) -> Vec<T> {
    let mut v: Vec<T> = xs.into_iter().collect();
    v.sort();
    v.dedup();
    v
}

// Sorted-vector set operations.
fn union<T: Ord + Clone>(a: &[T], b: &[T]) -> Vec<T> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j].clone());
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i].clone());
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

fn intersects<T: Ord>(a: &[T], b: &[T]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return true,
        }
    }
    false
}

fn combine(a: &Mutation, b: &Mutation) -> Option<Mutation> {
    let (x, y) = match (a, b) {
        (Mutation::ImmutablyValid, m) | (m, Mutation::ImmutablyValid) => return Some(m.clone()),
        (Mutation::Constrain(x), Mutation::Constrain(y)) => (x, y),
    };
    let required_action = match (&x.required_action, &y.required_action) {
        (Some(p), Some(q)) if p != q => return None,
        (Some(p), _) | (None, Some(p)) => Some(p.clone()),
        (None, None) => None,
    };
    let make_true = union(&x.make_true, &y.make_true);
    let make_false = union(&x.make_false, &y.make_false);
    let forbidden_actions = union(&x.forbidden_actions, &y.forbidden_actions);
    if intersects(&make_true, &make_false)
        || required_action
            .as_ref()
            .is_some_and(|r| forbidden_actions.binary_search(r).is_ok())
    {
        return None;
    }
    Some(Mutation::Constrain(Constraints {
        make_true,
        make_false,
        required_action,
        forbidden_actions,
    }))
}

/// Flattens mutations into one. `None` marks a contradiction.
pub fn satisfy_all(ms: &[Mutation]) -> Option<Mutation> {
    ms.iter()
        .try_fold(Mutation::ImmutablyValid, |acc, m| combine(&acc, m))
}

/// Every consistent way of picking one mutation from each set.
pub fn satisfy_each(sets: &[Vec<Mutation>]) -> Vec<Mutation> {
    let mut acc = vec![Mutation::ImmutablyValid];
    for set in sets {
        acc = product(&acc, set);
        if acc.is_empty() {
            break;
        }
    }
    acc
}

/// The union of the sets, collapsed to `{ImmutablyValid}` when it is a member.
pub fn satisfy_any(sets: &[Vec<Mutation>]) -> Vec<Mutation> {
    if sets.iter().flatten().any(|m| *m == Mutation::ImmutablyValid) {
        return vec![Mutation::ImmutablyValid];
    }
    sorted(sets.iter().flatten().cloned())
}

fn product(left: &[Mutation], right: &[Mutation]) -> Vec<Mutation> {
    let mut out = Vec::with_capacity(left.len() * right.len());
    for a in left {
        for b in right {
            if let Some(m) = combine(a, b) {
                out.push(m);
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Computes mutation sets against one domain's mutability index.
#[derive(Clone, Debug)]
pub struct Mutator<'a> {
    index: &'a MutabilityIndex,
    cap: usize,
}

impl<'a> Mutator<'a> {
    pub fn new(index: &'a MutabilityIndex) -> Self {
        Mutator {
            index,
            cap: DEFAULT_MUTATION_CAP,
        }
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    pub fn mutate_true(&self, s: &RelState, f: &Formula) -> Result<Vec<Mutation>> {
        f.validate(&[])?;
        self.walk(s, f, true, &mut Vec::new())
    }

    pub fn mutate_false(&self, s: &RelState, f: &Formula) -> Result<Vec<Mutation>> {
        f.validate(&[])?;
        self.walk(s, f, false, &mut Vec::new())
    }

    fn check_cap(&self, ms: Vec<Mutation>) -> Result<Vec<Mutation>> {
        if ms.len() > self.cap {
            return Err(Error::MutationLimit {
                size: ms.len(),
                cap: self.cap,
            });
        }
        Ok(ms)
    }

    // `want` is the truth value the formula should take.
    fn walk(
        &self,
        s: &RelState,
        f: &Formula,
        want: bool,
        env: &mut Vec<(Symbol, Symbol)>,
    ) -> Result<Vec<Mutation>> {
        match f {
            Formula::True => Ok(if want {
                vec![Mutation::ImmutablyValid]
            } else {
                Vec::new()
            }),
            Formula::Lit(l) => {
                let atom = Atom {
                    predicate: l.predicate,
                    args: ground(&l.terms, env)?,
                };
                Ok(self.literal(s, atom, want))
            }
            Formula::ActionAtom(name, terms) => {
                let action = GroundAction {
                    schema: *name,
                    args: ground(terms, env)?,
                };
                if !want {
                    return Ok(vec![Mutation::forbid(action)]);
                }
                if !self.action_feasible(s, &action)? {
                    return Ok(Vec::new());
                }
                Ok(vec![Mutation::require(action)])
            }
            Formula::Not(c) => self.walk(s, c, !want, env),
            Formula::And(cs) | Formula::Or(cs) => {
                // Conjunction of wanted-true children, or disjunction of
                // wanted-false ones, needs every child.
                let every = matches!(f, Formula::And(_)) == want;
                self.combine_children(cs.len(), every, |i, env| self.walk(s, &cs[i], want, env), env)
            }
            Formula::Exists(v, c) | Formula::Forall(v, c) => {
                let every = matches!(f, Formula::Forall(..)) == want;
                let consts = s.constants();
                self.combine_children(
                    consts.len(),
                    every,
                    |i, env| {
                        env.push((*v, consts[i]));
                        let r = self.walk(s, c, want, env);
                        env.pop();
                        r
                    },
                    env,
                )
            }
        }
    }

    fn combine_children(
        &self,
        n: usize,
        every: bool,
        mut child: impl FnMut(usize, &mut Vec<(Symbol, Symbol)>) -> Result<Vec<Mutation>>,
        env: &mut Vec<(Symbol, Symbol)>,
    ) -> Result<Vec<Mutation>> {
        if every {
            let mut acc = vec![Mutation::ImmutablyValid];
            for i in 0..n {
                let set = child(i, env)?;
                acc = self.check_cap(product(&acc, &set))?;
                if acc.is_empty() {
                    break;
                }
            }
            Ok(acc)
        } else {
            let mut acc = Vec::new();
            for i in 0..n {
                let set = child(i, env)?;
                if set.contains(&Mutation::ImmutablyValid) {
                    return Ok(vec![Mutation::ImmutablyValid]);
                }
                acc.extend(set);
            }
            self.check_cap(sorted(acc))
        }
    }

    // A literal keeps a constraint while it could still flip away from the
    // wanted value; once it is pinned there it is immutably valid, and once
    // it is pinned to the other value it is unsatisfiable.
    fn literal(&self, s: &RelState, atom: Atom, want: bool) -> Vec<Mutation> {
        let present = s.contains(&atom);
        let can_add = self.index.can_become_true(atom.predicate);
        let can_del = self.index.can_become_false(atom.predicate);
        let (can_reach, can_leave) = if want { (can_add, can_del) } else { (can_del, can_add) };
        let constraint = || {
            if want {
                Mutation::make_true([atom.clone()])
            } else {
                Mutation::make_false([atom.clone()])
            }
        };
        if present == want {
            if can_leave {
                vec![constraint()]
            } else {
                vec![Mutation::ImmutablyValid]
            }
        } else if can_reach {
            vec![constraint()]
        } else {
            Vec::new()
        }
    }

    // An action can only be required if its precondition is still satisfiable.
    fn action_feasible(&self, s: &RelState, a: &GroundAction) -> Result<bool> {
        let Some((params, pre)) = self.index.preconditions.get(&a.schema) else {
            return Ok(true);
        };
        if params.len() != a.args.len() {
            return Ok(false);
        }
        let mut env: Vec<(Symbol, Symbol)> =
            params.iter().copied().zip(a.args.iter().copied()).collect();
        Ok(!self.walk(s, pre, true, &mut env)?.is_empty())
    }
}

fn ground(terms: &[Term], env: &[(Symbol, Symbol)]) -> Result<Args> {
    ground_terms(terms, |v| {
        env.iter().rev().find(|(k, _)| *k == v).map(|(_, c)| *c)
    })
}

pub fn mutate_true(s: &RelState, f: &Formula, idx: &MutabilityIndex) -> Result<Vec<Mutation>> {
    Mutator::new(idx).mutate_true(s, f)
}

pub fn mutate_false(s: &RelState, f: &Formula, idx: &MutabilityIndex) -> Result<Vec<Mutation>> {
    Mutator::new(idx).mutate_false(s, f)
}
