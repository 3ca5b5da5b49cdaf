//! Experiment sweeps, result files and golden checks.

mod goldens;
mod run;
mod spec;

pub use goldens::{verify_goldens, verify_goldens_with, GoldenCheck, GoldenReport};
pub use run::{
    episode_seed, log_slope, run_experiment, summary_path, CellSummary, GrowthEstimate, ResultRow, Stat, Summary,
    SCHEMA_VERSION,
};
pub use spec::{parse_sizes, ExperimentSpec};
