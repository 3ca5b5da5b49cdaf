use std::sync::{Arc, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domain::DomainDef;
use crate::fol::Atom;
use crate::state::RelState;
use crate::symbol::sym;

static DOMAIN: OnceLock<Arc<DomainDef>> = OnceLock::new();

pub fn shared() -> Arc<DomainDef> {
    super::cached(&DOMAIN, include_str!("../../domains/bins.dom"))
}

pub fn domain() -> DomainDef {
    (*shared()).clone()
}

/// `n` open bins `d1..dn` and `m` items `i1..im`, each item in a uniform bin.
pub fn generate(n: usize, m: usize, seed: u64) -> RelState {
    assert!(n >= 1, "bins instances need at least one bin");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bins: Vec<_> = (1..=n).map(|i| sym(&format!("d{i}"))).collect();
    let items: Vec<_> = (1..=m).map(|i| sym(&format!("i{i}"))).collect();
    let mut facts = Vec::new();
    for &b in &bins {
        facts.push(Atom::new(sym("IsBin"), [b]));
        facts.push(Atom::new(sym("Open"), [b]));
    }
    for &i in &items {
        facts.push(Atom::new(sym("IsItem"), [i]));
        facts.push(Atom::new(sym("InBin"), [i, bins[rng.gen_range(0..n)]]));
    }
    RelState::new(bins.iter().chain(&items).copied(), facts).expect("generated facts use known objects")
}
