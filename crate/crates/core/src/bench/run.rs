use std::fs::File;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::envs::{run_episode, EpisodeStatus};
use crate::error::{Error, Result};

use super::ExperimentSpec;

pub const SCHEMA_VERSION: u32 = 1;

const HEADER: [&str; 13] = [
    "schema_version",
    "domain",
    "size",
    "planner",
    "seed",
    "episode",
    "return",
    "normalized_score",
    "nodes_expanded",
    "plan_length",
    "status",
    "wall_time_ms",
    "fingerprint",
];

/// One CSV line per episode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub schema_version: u32,
    pub domain: String,
    pub size: usize,
    pub planner: String,
    pub seed: u64,
    pub episode: usize,
    /// Exact rational, e.g. `-7` or `3/2`.
    #[serde(rename = "return")]
    pub ret: String,
    pub normalized_score: Option<f64>,
    pub nodes_expanded: u64,
    pub plan_length: usize,
    pub status: EpisodeStatus,
    pub wall_time_ms: f64,
    pub fingerprint: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    pub stddev: f64,
}

impl Stat {
    fn of(xs: &[f64]) -> Option<Stat> {
        if xs.is_empty() {
            return None;
        }
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
        Some(Stat {
            mean,
            stddev: var.sqrt(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub domain: String,
    pub size: usize,
    pub planner: String,
    pub episodes: usize,
    pub success_rate: f64,
    pub budget_rate: f64,
    pub ret: Option<Stat>,
    /// Over episodes with a known optimum.
    pub normalized_score: Option<Stat>,
    pub nodes_expanded: Option<Stat>,
    pub plan_length: Option<Stat>,
    pub wall_time_ms: Option<Stat>,
}

/// Least-squares slope of `log(mean metric)` against size, per planner.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthEstimate {
    pub planner: String,
    pub metric: String,
    pub slope: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub schema_version: u32,
    pub fingerprint: String,
    pub spec: ExperimentSpec,
    pub cells: Vec<CellSummary>,
    pub growth: Vec<GrowthEstimate>,
    #[serde(skip)]
    pub rows: Vec<ResultRow>,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of episode `i` in a sweep with base seed `base`.
pub fn episode_seed(base: u64, i: usize) -> u64 {
    base ^ splitmix64(i as u64)
}

/// Slope of the least-squares line through `(x, ln y)`; `None` with fewer than
/// two usable points.
pub fn log_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points.iter().filter(|p| p.1 > 0.0).map(|&(x, y)| (x, y.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx)
}

pub fn summary_path(out: &Path) -> PathBuf {
    out.with_extension("summary.json")
}

/// Runs every cell of `spec`, writing the CSV to `spec.out` and the summary
/// next to it. Episodes within a cell run in parallel; rows are written in
/// a fixed order.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Summary> {
    spec.validate()?;
    let fingerprint = spec.fingerprint();
    let cfg = spec.episode_config();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.threads)
        .build()
        .map_err(|e| Error::Io(e.to_string()))?;

    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(&spec.out).map_err(csv_err)?;
    w.write_record(HEADER).map_err(csv_err)?;
    w.flush()?;

    let mut rows = Vec::new();
    let mut cells = Vec::new();
    for &size in &spec.sizes {
        for &planner in &spec.planners {
            let results = pool.install(|| {
                (0..spec.episodes)
                    .into_par_iter()
                    .map(|i| {
                        let seed = episode_seed(spec.seed, i);
                        run_episode(spec.domain, size, planner, seed, cfg).map(|r| (i, seed, r))
                    })
                    .collect::<Result<Vec<_>>>()
            })?;
            let cell_rows: Vec<ResultRow> = results
                .into_iter()
                .map(|(i, seed, r)| ResultRow {
                    schema_version: SCHEMA_VERSION,
                    domain: spec.domain.to_string(),
                    size,
                    planner: planner.to_string(),
                    seed,
                    episode: i,
                    ret: r.ret.to_string(),
                    normalized_score: r.normalized_score,
                    nodes_expanded: r.nodes_expanded,
                    plan_length: r.plan_length,
                    status: r.status,
                    wall_time_ms: r.wall_time.as_secs_f64() * 1e3,
                    fingerprint: fingerprint.clone(),
                })
                .collect();
            for row in &cell_rows {
                w.serialize(row).map_err(csv_err)?;
            }
            w.flush()?;
            cells.push(summarize(&cell_rows, spec.domain.to_string(), size, planner.to_string()));
            rows.extend(cell_rows);
        }
    }

    let mut growth = Vec::new();
    for planner in &spec.planners {
        let name = planner.to_string();
        let mine: Vec<&CellSummary> = cells.iter().filter(|c| c.planner == name).collect();
        for metric in ["nodes_expanded", "wall_time_ms"] {
            let pts: Vec<(f64, f64)> = mine
                .iter()
                .filter_map(|c| {
                    let s = if metric == "nodes_expanded" { &c.nodes_expanded } else { &c.wall_time_ms };
                    s.as_ref().map(|s| (c.size as f64, s.mean))
                })
                .collect();
            growth.push(GrowthEstimate {
                planner: name.clone(),
                metric: metric.to_string(),
                slope: log_slope(&pts),
            });
        }
    }

    let summary = Summary {
        schema_version: SCHEMA_VERSION,
        fingerprint,
        spec: spec.clone(),
        cells,
        growth,
        rows,
    };
    let f = File::create(summary_path(&spec.out))?;
    serde_json::to_writer_pretty(f, &summary).map_err(|e| Error::Io(e.to_string()))?;
    Ok(summary)
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

fn summarize(rows: &[ResultRow], domain: String, size: usize, planner: String) -> CellSummary {
    let n = rows.len();
    let frac = |st: EpisodeStatus| {
        if n == 0 {
            0.0
        } else {
            rows.iter().filter(|r| r.status == st).count() as f64 / n as f64
        }
    };
    let rets: Vec<f64> = rows
        .iter()
        .map(|r| {
            let q: crate::reward::Reward = r.ret.parse().expect("rows hold rationals");
            *q.numer() as f64 / *q.denom() as f64
        })
        .collect();
    let scores: Vec<f64> = rows.iter().filter_map(|r| r.normalized_score).collect();
    CellSummary {
        domain,
        size,
        planner,
        episodes: n,
        success_rate: frac(EpisodeStatus::Success),
        budget_rate: frac(EpisodeStatus::Budget),
        ret: Stat::of(&rets),
        normalized_score: Stat::of(&scores),
        nodes_expanded: Stat::of(&rows.iter().map(|r| r.nodes_expanded as f64).collect::<Vec<_>>()),
        plan_length: Stat::of(&rows.iter().map(|r| r.plan_length as f64).collect::<Vec<_>>()),
        wall_time_ms: Stat::of(&rows.iter().map(|r| r.wall_time_ms).collect::<Vec<_>>()),
    }
}
