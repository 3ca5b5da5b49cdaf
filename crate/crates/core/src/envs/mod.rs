//! Benchmark domains, instance generators and the episode runner.

pub mod bins;
pub mod blocks;
pub mod drawers;
pub mod episode;
pub mod fixtures;
pub mod grid;

pub use episode::{run_episode, DomainId, EpisodeResult, EpisodeStatus};

use std::sync::{Arc, OnceLock};

use crate::domain::{parse_domain, DomainDef};

pub(crate) fn cached(cell: &'static OnceLock<Arc<DomainDef>>, src: &str) -> Arc<DomainDef> {
    Arc::clone(cell.get_or_init(|| {
        Arc::new(parse_domain(src).expect("builtin domain definitions parse"))
    }))
}

/// The planning horizon used for relational instances.
pub fn relational_horizon(objects: usize) -> usize {
    8 * objects
}
