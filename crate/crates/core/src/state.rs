use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fol::Atom;
use crate::symbol::Symbol;

/// A relational state: a fixed object set plus the ground facts true in it.
///
/// Both collections are kept sorted and deduplicated, so derived equality,
/// hashing and ordering operate on the canonical form. Constants are shared
/// between a state and all of its successors.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RelState {
    constants: Arc<[Symbol]>,
    facts: Arc<[Atom]>,
}

impl RelState {
    pub fn new(
        constants: impl IntoIterator<Item = Symbol>,
        facts: impl IntoIterator<Item = Atom>,
    ) -> Result<Self> {
        let mut cs: Vec<Symbol> = constants.into_iter().collect();
        cs.sort();
        cs.dedup();
        let mut fs: Vec<Atom> = facts.into_iter().collect();
        fs.sort();
        fs.dedup();
        for f in &fs {
            if let Some(a) = f.args.iter().find(|a| cs.binary_search(a).is_err()) {
                return Err(Error::InvalidState(format!(
                    "fact {f} mentions unknown constant {a}"
                )));
            }
        }
        Ok(RelState {
            constants: cs.into(),
            facts: fs.into(),
        })
    }

    /// Builds a successor sharing this state's constants. `facts` must be
    /// sorted and deduplicated.
    pub(crate) fn with_sorted_facts(&self, facts: Vec<Atom>) -> Self {
        debug_assert!(facts.windows(2).all(|w| w[0] < w[1]));
        RelState {
            constants: Arc::clone(&self.constants),
            facts: facts.into(),
        }
    }

    /// Returns a copy with `make_true` added and `make_false` removed.
    pub fn overlay<'a>(
        &self,
        make_true: impl IntoIterator<Item = &'a Atom>,
        make_false: impl IntoIterator<Item = &'a Atom>,
    ) -> Self {
        let removed: Vec<&Atom> = make_false.into_iter().collect();
        let mut facts: Vec<Atom> = self
            .facts
            .iter()
            .filter(|f| !removed.contains(f))
            .cloned()
            .collect();
        facts.extend(make_true.into_iter().filter(|a| !removed.contains(a)).cloned());
        facts.sort();
        facts.dedup();
        self.with_sorted_facts(facts)
    }

    /// Constants in lexicographic order.
    pub fn constants(&self) -> &[Symbol] {
        &self.constants
    }

    /// Facts in canonical order.
    pub fn facts(&self) -> &[Atom] {
        &self.facts
    }

    pub fn contains(&self, atom: &Atom) -> bool {
        self.facts.binary_search(atom).is_ok()
    }

    /// Membership test without building an [`Atom`].
    pub fn holds(&self, predicate: Symbol, args: &[Symbol]) -> bool {
        self.facts
            .binary_search_by(|f| {
                f.predicate
                    .cmp(&predicate)
                    .then_with(|| f.args.as_slice().cmp(args))
            })
            .is_ok()
    }

    pub fn has_constant(&self, c: Symbol) -> bool {
        self.constants.binary_search(&c).is_ok()
    }
}

impl fmt::Debug for RelState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RelState{{")?;
        for (i, a) in self.facts.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Display for RelState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}
