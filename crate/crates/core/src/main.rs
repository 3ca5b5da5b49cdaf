use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use milestone::bench::{parse_sizes, run_experiment, summary_path, verify_goldens, verify_goldens_with, ExperimentSpec};
use milestone::envs::{bins, blocks, drawers, DomainId};
use milestone::fol::syntax::parse_state;
use milestone::mdp::RelMdp;
use milestone::planners::{bfs_oracle, PlannerKind};
use milestone::Error;

#[derive(Parser)]
#[command(name = "milestone", version, about = "Milestone planning experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a sweep from a spec file or from flags.
    Run {
        #[arg(long, conflicts_with_all = ["domain", "sizes", "planner"])]
        spec: Option<PathBuf>,
        /// grid, blocks, drawers:N or bins:N
        #[arg(long)]
        domain: Option<String>,
        /// `a..b`, `a,b,c` or a single size
        #[arg(long)]
        sizes: Option<String>,
        /// Comma-separated, e.g. `greedy,introspector,beam:8`
        #[arg(long)]
        planner: Option<String>,
        #[arg(long, default_value_t = 100)]
        episodes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "results.csv")]
        out: PathBuf,
        #[arg(long)]
        node_cap: Option<u64>,
        /// Seconds per episode.
        #[arg(long)]
        time_cap: Option<f64>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Check the worked examples against the fixtures.
    VerifyGoldens {
        /// Directory holding `bins_2x2.state` and `fig3a.state`.
        #[arg(long)]
        fixtures: Option<PathBuf>,
    },
    /// Dump the reachable state graph of a relational fixture.
    Oracle {
        #[arg(long)]
        fixture: PathBuf,
        /// blocks, bins or drawers; inferred from the predicates if absent.
        #[arg(long)]
        domain: Option<String>,
        #[arg(long, default_value_t = 100_000)]
        state_cap: usize,
    },
}

fn bad(msg: impl Into<String>) -> Error {
    Error::BadSpec(msg.into())
}

fn flag_spec(
    domain: Option<String>,
    sizes: Option<String>,
    planner: Option<String>,
    out: PathBuf,
) -> milestone::Result<ExperimentSpec> {
    let domain: DomainId = domain.ok_or_else(|| bad("--domain is required without --spec"))?.parse()?;
    let sizes = parse_sizes(&sizes.ok_or_else(|| bad("--sizes is required without --spec"))?)?;
    let planners = planner
        .ok_or_else(|| bad("--planner is required without --spec"))?
        .split(',')
        .map(|p| p.trim().parse::<PlannerKind>())
        .collect::<milestone::Result<Vec<_>>>()?;
    Ok(ExperimentSpec::new(domain, sizes, planners, out))
}

fn run(cmd: Cmd) -> milestone::Result<ExitCode> {
    match cmd {
        Cmd::Run {
            spec,
            domain,
            sizes,
            planner,
            episodes,
            seed,
            out,
            node_cap,
            time_cap,
            threads,
        } => {
            let mut spec = match spec {
                Some(path) => {
                    let src = std::fs::read_to_string(&path).map_err(|e| bad(format!("{}: {e}", path.display())))?;
                    ExperimentSpec::from_toml(&src)?
                }
                None => {
                    let mut s = flag_spec(domain, sizes, planner, out)?;
                    s.episodes = episodes;
                    s.seed = seed;
                    s
                }
            };
            if let Some(n) = node_cap {
                spec.node_cap = n;
            }
            if let Some(t) = time_cap {
                spec.time_cap = t;
            }
            if let Some(t) = threads {
                spec.threads = t;
            }
            spec.validate()?;
            let summary = run_experiment(&spec)?;
            eprintln!(
                "wrote {} rows to {} and {}",
                summary.rows.len(),
                spec.out.display(),
                summary_path(&spec.out).display()
            );
            Ok(ExitCode::SUCCESS)
        }
        Cmd::VerifyGoldens { fixtures: dir } => {
            let report = match dir {
                None => verify_goldens(),
                Some(dir) => {
                    let load = |name: &str| -> milestone::Result<_> {
                        parse_state(&std::fs::read_to_string(dir.join(name))?)
                    };
                    verify_goldens_with(&load("bins_2x2.state")?, &load("fig3a.state")?)
                }
            };
            println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Cmd::Oracle {
            fixture,
            domain,
            state_cap,
        } => {
            let s0 = parse_state(&std::fs::read_to_string(&fixture)?)?;
            let candidates = [("blocks", blocks::shared()), ("bins", bins::shared()), ("drawers", drawers::shared())];
            let d = match domain {
                Some(name) => candidates
                    .iter()
                    .find(|(n, _)| *n == name)
                    .map(|(_, d)| d.clone())
                    .ok_or_else(|| bad(format!("unknown domain `{name}`")))?,
                None => candidates
                    .iter()
                    .find(|(_, d)| d.check_state(&s0).is_ok())
                    .map(|(_, d)| d.clone())
                    .ok_or_else(|| bad("no built-in domain matches the fixture's predicates"))?,
            };
            let h = milestone::envs::relational_horizon(s0.constants().len());
            let g = bfs_oracle(&RelMdp::new(d, s0, h), state_cap)?;
            print!("{}", g.dump());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse().cmd) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::BadSpec(_) | Error::Parse { .. } | Error::InvalidState(_) => ExitCode::from(2),
                _ => ExitCode::from(3),
            }
        }
    }
}
