//! Random closed formulas over a tiny vocabulary, and a brute-force check of
//! mutation sets against every reachable assignment of the mutable literals.

#![allow(dead_code)]

use milestone::fol::{evaluate, Atom, Formula, GroundAction, Term};
use milestone::mutation::{MutabilityIndex, Mutation, Mutator};
use milestone::state::RelState;
use milestone::symbol::{sym, Symbol};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// `P/1`, `Q/2`, `R/0`; action schemas `A/1` and `B/0`.
pub const PREDICATES: [(&str, usize); 3] = [("P", 1), ("Q", 2), ("R", 0)];

pub struct Case {
    pub state: RelState,
    pub formula: Formula,
    pub index: MutabilityIndex,
    pub addable: Vec<Symbol>,
    pub deletable: Vec<Symbol>,
}

fn depth(f: &Formula) -> usize {
    match f {
        Formula::Lit(_) | Formula::ActionAtom(..) | Formula::True => 1,
        Formula::Not(c) | Formula::Exists(_, c) | Formula::Forall(_, c) => 1 + depth(c),
        Formula::And(cs) | Formula::Or(cs) => 1 + cs.iter().map(depth).max().unwrap_or(0),
    }
}

fn term(rng: &mut ChaCha8Rng, consts: &[Symbol], vars: &[Symbol]) -> Term {
    if !vars.is_empty() && rng.gen_bool(0.7) {
        Term::Var(*vars.choose(rng).unwrap())
    } else {
        Term::Const(*consts.choose(rng).unwrap())
    }
}

fn formula(rng: &mut ChaCha8Rng, levels: usize, consts: &[Symbol], vars: &mut Vec<Symbol>, fresh: &mut usize) -> Formula {
    if levels == 1 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..10) {
            0 => Formula::action(sym("A"), [term(rng, consts, vars)]),
            1 => Formula::action(sym("B"), []),
            _ => {
                let (p, arity) = *PREDICATES.choose(rng).unwrap();
                Formula::lit(sym(p), (0..arity).map(|_| term(rng, consts, vars)).collect::<Vec<_>>())
            }
        };
    }
    match rng.gen_range(0..5) {
        0 | 1 => {
            let n = rng.gen_range(2..=3);
            let cs = (0..n).map(|_| formula(rng, levels - 1, consts, vars, fresh)).collect();
            if rng.gen_bool(0.5) {
                Formula::And(cs)
            } else {
                Formula::Or(cs)
            }
        }
        2 => Formula::not(formula(rng, levels - 1, consts, vars, fresh)),
        _ => {
            let v = sym(&format!("?V{fresh}"));
            *fresh += 1;
            vars.push(v);
            let body = formula(rng, levels - 1, consts, vars, fresh);
            vars.pop();
            if rng.gen_bool(0.5) {
                Formula::exists(v, body)
            } else {
                Formula::forall(v, body)
            }
        }
    }
}

pub fn ground_atoms(consts: &[Symbol]) -> Vec<Atom> {
    let mut out = vec![Atom::new(sym("R"), [])];
    for &a in consts {
        out.push(Atom::new(sym("P"), [a]));
        for &b in consts {
            out.push(Atom::new(sym("Q"), [a, b]));
        }
    }
    out
}

/// A closed formula of depth at most 3 over 1 to 3 constants, a random
/// state and random mutability flags.
pub fn random_case(rng: &mut ChaCha8Rng) -> Case {
    let n = rng.gen_range(1..=3);
    let consts: Vec<Symbol> = (0..n).map(|i| sym(&format!("c{i}"))).collect();
    let facts: Vec<Atom> = ground_atoms(&consts).into_iter().filter(|_| rng.gen_bool(0.5)).collect();
    let state = RelState::new(consts.iter().copied(), facts).unwrap();
    let mut addable = Vec::new();
    let mut deletable = Vec::new();
    for (p, _) in PREDICATES {
        if rng.gen_bool(0.6) {
            addable.push(sym(p));
        }
        if rng.gen_bool(0.6) {
            deletable.push(sym(p));
        }
    }
    let levels = rng.gen_range(1..=3);
    let f = formula(rng, levels, &consts, &mut Vec::new(), &mut 0);
    assert!(depth(&f) <= 3);
    Case {
        state,
        formula: f,
        index: MutabilityIndex::from_flags(addable.iter().copied(), deletable.iter().copied()),
        addable,
        deletable,
    }
}

/// Every state reachable by flipping literals only in the directions their
/// predicates allow.
pub fn allowed_states(c: &Case) -> Vec<RelState> {
    let consts = c.state.constants().to_vec();
    let mut fixed = Vec::new();
    let mut free = Vec::new();
    for a in ground_atoms(&consts) {
        let present = c.state.contains(&a);
        let flips = if present {
            c.deletable.contains(&a.predicate)
        } else {
            c.addable.contains(&a.predicate)
        };
        if flips {
            free.push(a);
        } else if present {
            fixed.push(a);
        }
    }
    (0u32..1 << free.len())
        .map(|mask| {
            let mut facts = fixed.clone();
            facts.extend(free.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, a)| a.clone()));
            RelState::new(consts.iter().copied(), facts).unwrap()
        })
        .collect()
}

pub fn actions(consts: &[Symbol]) -> Vec<GroundAction> {
    let mut out: Vec<GroundAction> = consts.iter().map(|&c| GroundAction::new(sym("A"), [c])).collect();
    out.push(GroundAction::new(sym("B"), []));
    out
}

#[derive(Debug, Default)]
pub struct Violations {
    pub unsound: usize,
    pub incomplete: usize,
}

/// Compares the mutations of `f` (or of `¬f` when `want` is false) with the
/// truth of `f` over every allowed state and action.
pub fn check(c: &Case, want: bool) -> Violations {
    let mutator = Mutator::new(&c.index);
    let ms: Vec<Mutation> = if want {
        mutator.mutate_true(&c.state, &c.formula)
    } else {
        mutator.mutate_false(&c.state, &c.formula)
    }
    .unwrap();
    let acts = actions(c.state.constants());
    let mut v = Violations::default();
    for s in allowed_states(c) {
        for a in &acts {
            let truth = evaluate(&c.formula, &s, Some(a)).unwrap() == want;
            let hit = ms.iter().any(|m| m.is_satisfied(&s, Some(a)));
            if hit && !truth {
                v.unsound += 1;
            }
            if truth && !hit {
                v.incomplete += 1;
            }
        }
    }
    v
}
