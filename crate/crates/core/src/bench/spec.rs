use std::path::PathBuf;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::envs::episode::EpisodeConfig;
use crate::envs::DomainId;
use crate::error::{Error, Result};
use crate::planners::{Budget, PlannerKind};

fn default_episodes() -> usize {
    100
}

fn default_node_cap() -> u64 {
    5_000_000
}

fn default_time_cap() -> f64 {
    60.0
}

fn default_oracle_cap() -> usize {
    20_000
}

/// One sweep: every size crossed with every planner, `episodes` times.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub domain: DomainId,
    pub sizes: Vec<usize>,
    pub planners: Vec<PlannerKind>,
    #[serde(default = "default_episodes")]
    pub episodes: usize,
    #[serde(default)]
    pub seed: u64,
    pub out: PathBuf,
    #[serde(default = "default_node_cap")]
    pub node_cap: u64,
    /// Seconds per episode.
    #[serde(default = "default_time_cap")]
    pub time_cap: f64,
    /// Largest state space enumerated to normalize relational scores; 0 skips.
    #[serde(default = "default_oracle_cap")]
    pub oracle_cap: usize,
    /// Worker threads; 0 uses every core.
    #[serde(default)]
    pub threads: usize,
}

impl ExperimentSpec {
    pub fn new(domain: DomainId, sizes: Vec<usize>, planners: Vec<PlannerKind>, out: impl Into<PathBuf>) -> Self {
        ExperimentSpec {
            domain,
            sizes,
            planners,
            episodes: default_episodes(),
            seed: 0,
            out: out.into(),
            node_cap: default_node_cap(),
            time_cap: default_time_cap(),
            oracle_cap: default_oracle_cap(),
            threads: 0,
        }
    }

    pub fn from_toml(src: &str) -> Result<Self> {
        let spec: ExperimentSpec = toml::from_str(src).map_err(|e| Error::BadSpec(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("spec fields serialize")
    }

    pub fn validate(&self) -> Result<()> {
        if self.sizes.contains(&0) {
            return Err(Error::BadSpec("sizes must be at least 1".to_string()));
        }
        if self.node_cap == 0 {
            return Err(Error::BadSpec("node_cap must be positive".to_string()));
        }
        if !(self.time_cap.is_finite() && self.time_cap > 0.0) {
            return Err(Error::BadSpec("time_cap must be a positive number of seconds".to_string()));
        }
        Ok(())
    }

    pub fn episode_config(&self) -> EpisodeConfig {
        EpisodeConfig {
            budget: Budget {
                node_cap: self.node_cap,
                time_cap: Some(Duration::from_secs_f64(self.time_cap)),
            },
            oracle_cap: self.oracle_cap,
        }
    }

    /// Hash of everything that affects results. The output path and the
    /// thread count are left out.
    pub fn fingerprint(&self) -> String {
        let mut canon = self.clone();
        canon.out = PathBuf::new();
        canon.threads = 0;
        let digest = Sha256::digest(canon.to_toml().as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Parses `a..b` (inclusive), `a,b,c` or a single size.
pub fn parse_sizes(s: &str) -> Result<Vec<usize>> {
    let bad = || Error::BadSpec(format!("bad size list `{s}`"));
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
    if let Some((a, b)) = s.split_once("..") {
        let (a, b) = (num(a)?, num(b)?);
        if a > b {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    s.split(',').filter(|t| !t.trim().is_empty()).map(num).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_round_trip() {
        let src = r#"
            domain = "bins:2"
            sizes = [2, 3]
            planners = ["greedy", "beam:8"]
            episodes = 5
            seed = 9
            out = "bins.csv"
        "#;
        let spec = ExperimentSpec::from_toml(src).unwrap();
        assert_eq!(spec.domain, DomainId::Bins(2));
        assert_eq!(spec.node_cap, 5_000_000);
        assert_eq!(ExperimentSpec::from_toml(&spec.to_toml()).unwrap(), spec);
    }

    #[test]
    fn bad_specs() {
        for src in [
            "domain = \"maze\"\nsizes=[1]\nplanners=[]\nout=\"x\"",
            "domain = \"grid\"\nsizes=[0]\nplanners=[]\nout=\"x\"",
            "domain = \"grid\"\nsizes=[1]\nplanners=[\"astar\"]\nout=\"x\"",
            "domain = \"grid\"\nsizes=[1]\nplanners=[]\nout=\"x\"\nbogus=1",
        ] {
            assert!(matches!(ExperimentSpec::from_toml(src), Err(Error::BadSpec(_))), "{src}");
        }
    }

    #[test]
    fn fingerprint_ignores_output_path() {
        let a = ExperimentSpec::new(DomainId::Grid, vec![3], vec![PlannerKind::Greedy], "a.csv");
        let mut b = a.clone();
        b.out = "b.csv".into();
        assert_eq!(a.fingerprint(), b.fingerprint());
        b.seed = 1;
        assert_ne!(a.fingerprint(), b.fingerprint());
    }

    #[test]
    fn size_lists() {
        assert_eq!(parse_sizes("2..5").unwrap(), [2, 3, 4, 5]);
        assert_eq!(parse_sizes("5,10,20").unwrap(), [5, 10, 20]);
        assert!(parse_sizes("5..2").is_err());
        assert!(parse_sizes("x").is_err());
    }
}
