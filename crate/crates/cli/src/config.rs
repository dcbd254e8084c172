//! Pipeline configuration: one TOML file drives every subcommand, with
//! command-line flags overriding individual keys. The resolved config is
//! embedded in run manifests so any artifact can be reproduced.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use walkrank_core::rng::fnv1a64;
use walkrank_core::train::TrainConfig;

use crate::error::{io_err, CliError};

pub const CONFIG_ENV_VAR: &str = "WALKRANK_CONFIG";

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,
    pub paths: PathsSection,
    pub walk: WalkSection,
    pub train: TrainSection,
    pub baseline: BaselineSection,
    pub evaluate: EvaluateSection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathsSection {
    pub triples: PathBuf,
    pub type_rules: Option<PathBuf>,
    pub metapath: Option<PathBuf>,
    pub test_sets: Vec<PathBuf>,
    pub output_dir: PathBuf,
}

impl Default for PathsSection {
    fn default() -> Self {
        PathsSection {
            triples: PathBuf::from("triples.nt"),
            type_rules: None,
            metapath: None,
            test_sets: Vec::new(),
            output_dir: PathBuf::from("out"),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WalkSection {
    pub strategy: String,
    pub walk_length: usize,
    pub walks_per_node: usize,
    pub p: f64,
    pub q: f64,
    pub em_iterations: usize,
    pub em_window: usize,
}

impl Default for WalkSection {
    fn default() -> Self {
        WalkSection {
            strategy: "node2vec".to_string(),
            walk_length: 20,
            walks_per_node: 10,
            p: 1.0,
            q: 1.0,
            em_iterations: 5,
            em_window: 2,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainSection {
    pub dim: usize,
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub min_count: u64,
    pub workers: usize,
    pub deterministic: bool,
}

impl Default for TrainSection {
    fn default() -> Self {
        TrainSection {
            dim: 128,
            window: 5,
            negatives: 5,
            epochs: 5,
            learning_rate: 0.025,
            min_count: 1,
            workers: 1,
            deterministic: true,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BaselineSection {
    /// Positive / negative links sampled from the graph for baseline
    /// training.
    pub n_pos: usize,
    pub n_neg: usize,
    /// Optional predicate URI restricting which edges count as positives.
    pub relation: Option<String>,
    /// Fraction of sampled links used for fitting; the rest validate.
    pub train_fraction: f64,
    pub l2: f64,
    pub learning_rate: f64,
    pub max_epochs: usize,
    pub tolerance: f64,
}

impl Default for BaselineSection {
    fn default() -> Self {
        BaselineSection {
            n_pos: 1000,
            n_neg: 1000,
            relation: None,
            train_fraction: 0.8,
            l2: 1e-4,
            learning_rate: 0.1,
            max_epochs: 200,
            tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvaluateSection {
    pub k_values: Vec<usize>,
    /// "hadamard" or "concat".
    pub feature_mode: String,
}

impl Default for EvaluateSection {
    fn default() -> Self {
        EvaluateSection {
            k_values: vec![10, 50, 100],
            feature_mode: "hadamard".to_string(),
        }
    }
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
    }

    /// Canonical TOML of the fully resolved configuration.
    pub fn resolved_toml(&self) -> Result<String, CliError> {
        toml::to_string_pretty(self).map_err(|e| CliError::Internal(e.to_string()))
    }

    /// Stable fingerprint of the resolved configuration.
    pub fn fingerprint(&self) -> Result<u64, CliError> {
        Ok(fnv1a64(self.resolved_toml()?.as_bytes()))
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            dim: self.train.dim,
            window: self.train.window,
            negatives: self.train.negatives,
            epochs: self.train.epochs,
            learning_rate: self.train.learning_rate,
            min_count: self.train.min_count,
            seed: self.seed,
            workers: self.train.workers,
            deterministic: self.train.deterministic,
        }
    }

    pub fn output_dir(&self) -> &Path {
        &self.paths.output_dir
    }

    pub fn ensure_output_dir(&self) -> Result<(), CliError> {
        std::fs::create_dir_all(&self.paths.output_dir)
            .map_err(|e| io_err(&self.paths.output_dir, e))
    }

    pub fn graph_cache_path(&self) -> PathBuf {
        self.paths.output_dir.join("graph.bin")
    }

    pub fn corpus_path(&self) -> PathBuf {
        self.paths
            .output_dir
            .join(format!("corpus_{}.txt", self.walk.strategy))
    }

    pub fn embeddings_bin_path(&self) -> PathBuf {
        self.paths
            .output_dir
            .join(format!("embeddings_{}.bin", self.walk.strategy))
    }

    pub fn embeddings_text_path(&self) -> PathBuf {
        self.paths
            .output_dir
            .join(format!("embeddings_{}.txt", self.walk.strategy))
    }

    pub fn manifest_path(&self) -> PathBuf {
        self.paths
            .output_dir
            .join(format!("manifest_{}.txt", self.walk.strategy))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_documented_values() {
        let c = PipelineConfig::default();
        assert_eq!(c.walk.walk_length, 20);
        assert_eq!(c.walk.walks_per_node, 10);
        assert_eq!(c.train.dim, 128);
        assert_eq!(c.train.window, 5);
        assert_eq!(c.train.negatives, 5);
        assert_eq!(c.train.epochs, 5);
        assert_eq!(c.train.learning_rate, 0.025);
        assert_eq!(c.evaluate.k_values, vec![10, 50, 100]);
        assert_eq!(c.baseline.train_fraction, 0.8);
    }

    #[test]
    fn round_trips_through_toml() {
        let c = PipelineConfig::default();
        let text = c.resolved_toml().unwrap();
        let back: PipelineConfig = toml::from_str(&text).unwrap();
        assert_eq!(back.resolved_toml().unwrap(), text);
        assert_eq!(back.fingerprint().unwrap(), c.fingerprint().unwrap());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let result: Result<PipelineConfig, _> = toml::from_str("typo_key = 1");
        assert!(result.is_err());
    }

    #[test]
    fn fingerprint_tracks_values() {
        let a = PipelineConfig::default();
        let b = PipelineConfig {
            seed: 99,
            ..PipelineConfig::default()
        };
        assert_ne!(a.fingerprint().unwrap(), b.fingerprint().unwrap());
    }
}
