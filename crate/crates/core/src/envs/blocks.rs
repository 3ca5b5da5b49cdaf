use std::sync::{Arc, OnceLock};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domain::DomainDef;
use crate::fol::Atom;
use crate::state::RelState;
use crate::symbol::{sym, Symbol};

static DOMAIN: OnceLock<Arc<DomainDef>> = OnceLock::new();

pub fn shared() -> Arc<DomainDef> {
    super::cached(&DOMAIN, include_str!("../../domains/blocks.dom"))
}

pub fn domain() -> DomainDef {
    (*shared()).clone()
}

/// Builds a state from stacks listed bottom to top, hand empty.
pub fn from_stacks(stacks: &[Vec<Symbol>]) -> RelState {
    let mut facts = vec![Atom::new(sym("HandEmpty"), [])];
    for st in stacks {
        for (i, &b) in st.iter().enumerate() {
            if i == 0 {
                facts.push(Atom::new(sym("OnTable"), [b]));
            } else {
                facts.push(Atom::new(sym("On"), [b, st[i - 1]]));
            }
        }
        if let Some(&top) = st.last() {
            facts.push(Atom::new(sym("Clear"), [top]));
        }
    }
    let constants = stacks.iter().flatten().copied();
    RelState::new(constants, facts).expect("stack facts use known blocks")
}

/// Blocks `b1..bn` split into `k = round(sqrt(n) * u)` stacks, `u ~ U[0.5, 1.5]`,
/// clipped to `[1, n]`. An instance that is already solved is resampled.
pub fn generate(n: usize, seed: u64) -> RelState {
    assert!(n >= 1, "blocks instances need at least one block");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names: Vec<Symbol> = (1..=n).map(|i| sym(&format!("b{i}"))).collect();
    loop {
        let u: f64 = rng.gen_range(0.5..=1.5);
        let k = ((n as f64).sqrt() * u).round().clamp(1.0, n as f64) as usize;
        let mut blocks = names.clone();
        blocks.shuffle(&mut rng);
        let mut stacks: Vec<Vec<Symbol>> = vec![Vec::new(); k];
        // Every stack gets one block; the rest land uniformly.
        for (i, b) in blocks.into_iter().enumerate() {
            let j = if i < k { i } else { rng.gen_range(0..k) };
            stacks[j].push(b);
        }
        for st in &mut stacks {
            st.shuffle(&mut rng);
        }
        let solved = stacks.iter().all(|st| st.len() == 1);
        if !solved || n < 2 {
            return from_stacks(&stacks);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn generated_states_are_valid_towers(n in 1usize..14, seed in any::<u64>()) {
            let d = domain();
            let s = generate(n, seed);
            d.check_state(&s).unwrap();
            prop_assert_eq!(s.constants().len(), n);
            let count = |p: &str| s.facts().iter().filter(|f| f.predicate == sym(p)).count();
            // Each block rests on exactly one thing; tops are clear.
            prop_assert_eq!(count("OnTable") + count("On"), n);
            prop_assert_eq!(count("OnTable"), count("Clear"));
            prop_assert_eq!(count("HandEmpty"), 1);
            if n >= 2 {
                prop_assert!(count("OnTable") < n);
            }
            prop_assert_eq!(generate(n, seed), s);
        }
    }
}
