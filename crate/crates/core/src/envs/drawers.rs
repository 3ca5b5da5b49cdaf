use std::sync::{Arc, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domain::DomainDef;
use crate::fol::Atom;
use crate::state::RelState;
use crate::symbol::sym;

static DOMAIN: OnceLock<Arc<DomainDef>> = OnceLock::new();

pub fn shared() -> Arc<DomainDef> {
    super::cached(&DOMAIN, include_str!("../../domains/drawers.dom"))
}

pub fn domain() -> DomainDef {
    (*shared()).clone()
}

/// `n` closed drawers and `m` items. Each item gets a uniform home drawer and a
/// uniform location among the drawers and the shelf. Instances with every
/// item already home are resampled.
pub fn generate(n: usize, m: usize, seed: u64) -> RelState {
    assert!(n >= 1 && m >= 1, "drawers instances need a drawer and an item");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let drawers: Vec<_> = (1..=n).map(|i| sym(&format!("d{i}"))).collect();
    let items: Vec<_> = (1..=m).map(|i| sym(&format!("i{i}"))).collect();
    loop {
        let mut facts = vec![Atom::new(sym("HandEmpty"), [])];
        facts.extend(drawers.iter().map(|&d| Atom::new(sym("IsDrawer"), [d])));
        let mut all_home = true;
        for &i in &items {
            facts.push(Atom::new(sym("IsItem"), [i]));
            let home = rng.gen_range(0..n);
            facts.push(Atom::new(sym("Belongs"), [i, drawers[home]]));
            let at = rng.gen_range(0..=n);
            if at == n {
                facts.push(Atom::new(sym("OnShelf"), [i]));
            } else {
                facts.push(Atom::new(sym("InDrawer"), [i, drawers[at]]));
            }
            all_home &= at == home;
        }
        if !all_home {
            return RelState::new(drawers.iter().chain(&items).copied(), facts)
                .expect("generated facts use known objects");
        }
    }
}
