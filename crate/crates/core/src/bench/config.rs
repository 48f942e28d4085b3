//! Experiment configuration, read from TOML.
//!
//! ```toml
//! output_dir = "out/desk"
//! shots = 200              # 0 trains on exact expectations
//! n_layers = 3
//! max_iters = 400
//! parallel = 1
//! seeds = [0, 1, 2, 3, 4]
//! architectures = ["A3", "A16"]
//! instances = ["fixtures/desk"]   # fixture files or directories of *.txt
//! baseline = "SVQE"
//! trailing_fraction = 0.02
//! shot_metrics = false
//!
//! [[generate]]
//! n = 4
//! p = 0.6
//! seed = 1000
//! k = 4
//! count = 2
//!
//! [[strategies]]
//! kind = "SHA"
//! partition = "NODEWISE"
//! partitions = 4
//! ```
//!
//! Relative paths resolve against the config file's directory, except
//! `output_dir`, which resolves against `$SHA_OUTPUT_ROOT` when that is set.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::ansatz::ArchitectureId;
use crate::error::{Error, Result};
use crate::problems::{generate_connected, parse_fixture, GraphInstance};
use crate::strategies::{LlParams, PartitionStrategy, StrategyKind, StrategySpec};

pub const OUTPUT_ROOT_ENV: &str = "SHA_OUTPUT_ROOT";

/// Seeds tried per generated instance before giving up on connectivity.
const GENERATE_TRIES: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerateSpec {
    pub n: usize,
    pub p: f64,
    pub seed: u64,
    #[serde(default = "default_k")]
    pub k: usize,
    /// Number of graphs, drawn from seeds `seed, seed+1, …` after skipping
    /// disconnected samples.
    #[serde(default = "one")]
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyEntry {
    pub kind: String,
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub partition: Option<String>,
    #[serde(default)]
    pub partitions: Option<usize>,
    #[serde(default)]
    pub per_stage_max_iters: Vec<usize>,
    #[serde(default)]
    pub ll: Option<LlParams>,
    #[serde(default)]
    pub qaoa_p: Option<usize>,
}

impl StrategyEntry {
    pub fn to_spec(&self) -> Result<StrategySpec> {
        let kind: StrategyKind = self.kind.parse().map_err(|e: Error| Error::Config(e.to_string()))?;
        let partition_strategy = self
            .partition
            .as_deref()
            .map(str::parse::<PartitionStrategy>)
            .transpose()
            .map_err(|e| Error::Config(e.to_string()))?;
        let spec = StrategySpec {
            kind,
            partition_strategy,
            n_partitions: self.partitions,
            per_stage_max_iters: self.per_stage_max_iters.clone(),
            ll_params: if kind.uses_ll_params() {
                Some(self.ll.unwrap_or_default())
            } else {
                self.ll
            },
            qaoa_p: if kind == StrategyKind::Qaoa {
                Some(self.qaoa_p.unwrap_or(3))
            } else {
                self.qaoa_p
            },
        };
        spec.validate().map_err(|e| Error::Config(e.to_string()))?;
        Ok(spec)
    }

    pub fn label(&self) -> Result<String> {
        Ok(match &self.name {
            Some(n) => n.clone(),
            None => self.to_spec()?.label(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub output_dir: PathBuf,
    #[serde(default = "default_shots")]
    pub shots: usize,
    #[serde(default = "default_layers")]
    pub n_layers: usize,
    #[serde(default = "default_iters")]
    pub max_iters: usize,
    #[serde(default = "one")]
    pub parallel: usize,
    pub seeds: Vec<u64>,
    pub architectures: Vec<String>,
    #[serde(default)]
    pub instances: Vec<PathBuf>,
    #[serde(default)]
    pub generate: Vec<GenerateSpec>,
    pub strategies: Vec<StrategyEntry>,
    #[serde(default = "default_baseline")]
    pub baseline: String,
    #[serde(default = "default_trailing")]
    pub trailing_fraction: f64,
    /// Also report the shot-sampled accuracy of the final state.
    #[serde(default)]
    pub shot_metrics: bool,
    /// Directory relative paths resolve against; set by [`ExperimentConfig::load`].
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn default_k() -> usize {
    4
}
fn one() -> usize {
    1
}
fn default_shots() -> usize {
    200
}
fn default_layers() -> usize {
    3
}
fn default_iters() -> usize {
    4000
}
fn default_baseline() -> String {
    "SVQE".into()
}
fn default_trailing() -> f64 {
    0.02
}

/// A named problem instance of the matrix.
#[derive(Debug, Clone)]
pub struct Instance {
    pub id: String,
    pub graph: GraphInstance,
}

impl ExperimentConfig {
    pub fn parse(text: &str, base_dir: impl Into<PathBuf>) -> Result<Self> {
        let mut cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.base_dir = base_dir.into();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, base)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.into()));
        if self.seeds.is_empty() {
            return bad("seeds must not be empty");
        }
        if self.architectures.is_empty() {
            return bad("architectures must not be empty");
        }
        if self.strategies.is_empty() {
            return bad("strategies must not be empty");
        }
        if self.instances.is_empty() && self.generate.is_empty() {
            return bad("need instances or generate entries");
        }
        if self.n_layers == 0 || self.max_iters == 0 || self.parallel == 0 {
            return bad("n_layers, max_iters and parallel must be >= 1");
        }
        if !(self.trailing_fraction > 0.0 && self.trailing_fraction <= 1.0) {
            return bad("trailing_fraction must be in (0, 1]");
        }
        self.architecture_ids()?;
        let mut labels = Vec::new();
        for s in &self.strategies {
            let l = s.label()?;
            if labels.contains(&l) {
                return Err(Error::Config(format!("duplicate strategy label {l}")));
            }
            labels.push(l);
        }
        for g in &self.generate {
            if g.count == 0 {
                return bad("generate.count must be >= 1");
            }
        }
        for path in &self.instances {
            if !self.resolve(path).exists() {
                return Err(Error::Config(format!("instance path {} does not exist", path.display())));
            }
        }
        Ok(())
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }

    pub fn output_path(&self) -> PathBuf {
        if self.output_dir.is_absolute() {
            return self.output_dir.clone();
        }
        match std::env::var_os(OUTPUT_ROOT_ENV) {
            Some(root) => PathBuf::from(root).join(&self.output_dir),
            None => self.base_dir.join(&self.output_dir),
        }
    }

    pub fn architecture_ids(&self) -> Result<Vec<ArchitectureId>> {
        self.architectures
            .iter()
            .map(|a| a.parse().map_err(|e: Error| Error::Config(e.to_string())))
            .collect()
    }

    /// Strategies with their row labels.
    pub fn strategy_specs(&self) -> Result<Vec<(String, StrategySpec)>> {
        self.strategies.iter().map(|s| Ok((s.label()?, s.to_spec()?))).collect()
    }

    /// Fixture files (directories expand to their sorted `*.txt` files)
    /// followed by generated graphs.
    pub fn load_instances(&self) -> Result<Vec<Instance>> {
        let mut out = Vec::new();
        for p in &self.instances {
            let path = self.resolve(p);
            let files = if path.is_dir() {
                let mut fs: Vec<PathBuf> = std::fs::read_dir(&path)
                    .map_err(|e| Error::io(&path, e))?
                    .filter_map(|e| e.ok().map(|e| e.path()))
                    .filter(|f| f.extension().is_some_and(|x| x == "txt"))
                    .collect();
                fs.sort();
                fs
            } else {
                vec![path]
            };
            for f in files {
                let text = std::fs::read_to_string(&f).map_err(|e| Error::io(&f, e))?;
                let graph = parse_fixture(&text).map_err(|e| Error::Config(format!("{}: {e}", f.display())))?;
                let id = f.file_stem().map_or_else(|| "instance".into(), |s| s.to_string_lossy().into_owned());
                out.push(Instance { id, graph });
            }
        }
        for g in &self.generate {
            let mut seed = g.seed;
            for _ in 0..g.count {
                let graph = generate_connected(g.n, g.p, seed, g.k, 1, GENERATE_TRIES)?;
                seed = graph.seed + 1;
                out.push(Instance {
                    id: format!("gen-n{}-p{}-s{}", g.n, g.p, graph.seed),
                    graph,
                });
            }
        }
        let mut ids: Vec<&str> = out.iter().map(|i| i.id.as_str()).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Config("duplicate instance ids".into()));
        }
        Ok(out)
    }
}
