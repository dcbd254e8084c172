//! Subcommand implementations. Each returns a summary the binary prints
//! and the tests inspect; all artifact writes are deterministic given
//! identical inputs and seed (no timestamps, stable orderings).

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use walkrank_core::eval::{compare_report, confusion, metrics, LabeledPairSet};
use walkrank_core::graph::HeteroGraph;
use walkrank_core::logreg::{
    fit_logreg, pair_features, predict_logreg, sample_training_links, FeatureMode, FitConfig,
};
use walkrank_core::rank::rank_targets;
use walkrank_core::rng::Rng;
use walkrank_core::train::{train, TrainStats};
use walkrank_core::walk::{Strategy, WalkConfig, WalkCorpus};

use crate::config::PipelineConfig;
use crate::error::{io_err, CliError};
use crate::io::{baseline, corpus as corpus_io, embeddings, graph_cache, pairs, triples};
use crate::parallel::{generate_corpus_parallel, train_parallel};

/// Substream tag for the baseline train/validation split.
const STREAM_SPLIT: u64 = 7;

fn build_walk_config(
    config: &PipelineConfig,
    graph: &HeteroGraph,
) -> Result<WalkConfig, CliError> {
    let strategy = Strategy::parse(&config.walk.strategy)?;
    let metapath = if strategy == Strategy::Metapath {
        let path = config.paths.metapath.as_ref().ok_or_else(|| {
            CliError::config("metapath strategy requires paths.metapath in the config")
        })?;
        Some(triples::load_metapath(path, graph.registry())?)
    } else {
        None
    };
    Ok(WalkConfig {
        walk_length: config.walk.walk_length,
        walks_per_node: config.walk.walks_per_node,
        strategy,
        p: config.walk.p,
        q: config.walk.q,
        metapath,
        em_iterations: config.walk.em_iterations,
        em_window: config.walk.em_window,
        seed: config.seed,
    })
}

fn load_cached_graph(config: &PipelineConfig) -> Result<HeteroGraph, CliError> {
    let path = config.graph_cache_path();
    if !path.exists() {
        return Err(CliError::data(format!(
            "graph cache not found at {}; run `walkrank ingest` first",
            path.display()
        )));
    }
    graph_cache::load_graph(&path)
}

#[derive(Debug)]
pub struct IngestSummary {
    pub cache_path: PathBuf,
    pub nodes: usize,
    pub edges: usize,
    pub node_type_counts: Vec<(String, usize)>,
    pub edge_types: usize,
    pub duplicates_dropped: u64,
    pub self_loops_dropped: u64,
}

impl std::fmt::Display for IngestSummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(
            f,
            "ingested {} nodes, {} edges, {} edge types -> {}",
            self.nodes,
            self.edges,
            self.edge_types,
            self.cache_path.display()
        )?;
        let types: Vec<String> = self
            .node_type_counts
            .iter()
            .filter(|(_, n)| *n > 0)
            .map(|(name, n)| format!("{name}: {n}"))
            .collect();
        writeln!(f, "node types {{{}}}", types.join(", "))?;
        write!(
            f,
            "dropped {} duplicate triples, {} self-loops",
            self.duplicates_dropped, self.self_loops_dropped
        )
    }
}

pub fn cmd_ingest(config: &PipelineConfig) -> Result<IngestSummary, CliError> {
    let graph = triples::read_graph(&config.paths.triples, config.paths.type_rules.as_deref())?;
    config.ensure_output_dir()?;
    let cache_path = config.graph_cache_path();
    graph_cache::save_graph(&graph, &cache_path)?;

    let registry = graph.registry();
    let mut node_type_counts = vec![0usize; registry.node_type_count()];
    for &ty in graph.node_types() {
        node_type_counts[ty as usize] += 1;
    }
    Ok(IngestSummary {
        cache_path,
        nodes: graph.node_count(),
        edges: graph.edge_count(),
        node_type_counts: registry
            .node_type_names()
            .iter()
            .cloned()
            .zip(node_type_counts)
            .collect(),
        edge_types: registry.edge_type_count(),
        duplicates_dropped: graph.stats().duplicates_dropped,
        self_loops_dropped: graph.stats().self_loops_dropped,
    })
}

#[derive(Debug)]
pub struct WalkSummary {
    pub corpus_path: PathBuf,
    pub walks: usize,
    pub tokens: u64,
    pub truncated_walks: u64,
    pub zero_weight_fallbacks: u64,
}

impl std::fmt::Display for WalkSummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "wrote {} walks ({} tokens, {} truncated, {} zero-weight fallbacks) -> {}",
            self.walks,
            self.tokens,
            self.truncated_walks,
            self.zero_weight_fallbacks,
            self.corpus_path.display()
        )
    }
}

fn generate_configured_corpus(
    config: &PipelineConfig,
    graph: &HeteroGraph,
) -> Result<WalkCorpus, CliError> {
    let walk_config = build_walk_config(config, graph)?;
    generate_corpus_parallel(graph, &walk_config, config.train.workers)
}

pub fn cmd_walk(config: &PipelineConfig) -> Result<WalkSummary, CliError> {
    let graph = load_cached_graph(config)?;
    let corpus = generate_configured_corpus(config, &graph)?;
    config.ensure_output_dir()?;
    let corpus_path = config.corpus_path();
    corpus_io::write_corpus(&corpus, graph.uris(), &corpus_path)?;
    Ok(WalkSummary {
        corpus_path,
        walks: corpus.walks.len(),
        tokens: corpus.token_count(),
        truncated_walks: corpus.truncated_walks,
        zero_weight_fallbacks: corpus.zero_weight_fallbacks,
    })
}

#[derive(Debug)]
pub struct TrainSummary {
    pub embeddings_bin: PathBuf,
    pub embeddings_text: PathBuf,
    pub manifest: PathBuf,
    pub rows: usize,
    pub dim: usize,
    pub stats: TrainStats,
}

impl std::fmt::Display for TrainSummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(
            f,
            "trained {} x {} embeddings ({} pairs) -> {}",
            self.rows,
            self.dim,
            self.stats.pairs_trained,
            self.embeddings_bin.display()
        )?;
        let losses: Vec<String> = self
            .stats
            .epoch_mean_loss
            .iter()
            .map(|l| format!("{l:.4}"))
            .collect();
        write!(f, "epoch mean loss: [{}]", losses.join(", "))
    }
}

pub fn cmd_train(config: &PipelineConfig) -> Result<TrainSummary, CliError> {
    let graph = load_cached_graph(config)?;
    let walk_config = build_walk_config(config, &graph)?;
    let corpus = generate_corpus_parallel(&graph, &walk_config, config.train.workers)?;
    let train_config = config.train_config();
    let (model, stats) = if config.train.deterministic {
        train(&corpus, graph.uris(), &train_config)?
    } else {
        train_parallel(&corpus, graph.uris(), &train_config)?
    };

    config.ensure_output_dir()?;
    let bin_path = config.embeddings_bin_path();
    let text_path = config.embeddings_text_path();
    embeddings::write_embeddings_bin(&model, &bin_path, true)?;
    embeddings::write_embeddings_text(&model, &text_path)?;

    let manifest_path = config.manifest_path();
    let manifest = render_manifest(config, &walk_config, &corpus, &stats)?;
    std::fs::write(&manifest_path, manifest).map_err(|e| io_err(&manifest_path, e))?;

    Ok(TrainSummary {
        embeddings_bin: bin_path,
        embeddings_text: text_path,
        manifest: manifest_path,
        rows: model.rows(),
        dim: model.dim(),
        stats,
    })
}

fn render_manifest(
    config: &PipelineConfig,
    walk_config: &WalkConfig,
    corpus: &WalkCorpus,
    stats: &TrainStats,
) -> Result<String, CliError> {
    let mut out = String::new();
    let _ = writeln!(out, "walkrank run manifest");
    let _ = writeln!(out, "command: train");
    let _ = writeln!(out, "strategy: {}", corpus.strategy);
    let _ = writeln!(out, "seed: {}", config.seed);
    let _ = writeln!(out, "walk_config_hash: {:016x}", walk_config.config_hash());
    let _ = writeln!(
        out,
        "train_config_hash: {:016x}",
        config.train_config().config_hash()
    );
    let _ = writeln!(out, "config_fingerprint: {:016x}", config.fingerprint()?);
    let _ = writeln!(out, "corpus_walks: {}", corpus.walks.len());
    let _ = writeln!(out, "corpus_tokens: {}", corpus.token_count());
    let _ = writeln!(out, "truncated_walks: {}", corpus.truncated_walks);
    let _ = writeln!(
        out,
        "zero_weight_fallbacks: {}",
        corpus.zero_weight_fallbacks
    );
    let _ = writeln!(out, "pairs_trained: {}", stats.pairs_trained);
    let _ = writeln!(out, "negatives_skipped: {}", stats.negatives_skipped);
    let losses: Vec<String> = stats
        .epoch_mean_loss
        .iter()
        .map(|l| format!("{l:.16e}"))
        .collect();
    let _ = writeln!(out, "epoch_mean_loss: [{}]", losses.join(", "));
    let _ = writeln!(out, "--- resolved config ---");
    out.push_str(&config.resolved_toml()?);
    Ok(out)
}

/// Up to five vocabulary labels sharing the longest matching prefix of the
/// query; used in unknown-source errors.
fn prefix_suggestions(labels: &[String], query: &str, limit: usize) -> Vec<String> {
    for len in (1..=query.len()).rev() {
        if !query.is_char_boundary(len) {
            continue;
        }
        let prefix = &query[..len];
        let mut matches: Vec<String> = labels
            .iter()
            .filter(|l| l.starts_with(prefix))
            .take(limit)
            .cloned()
            .collect();
        if !matches.is_empty() {
            matches.sort();
            return matches;
        }
    }
    Vec::new()
}

pub fn cmd_rank(
    config: &PipelineConfig,
    source: &str,
    k: usize,
    target_type: Option<&str>,
    output: Option<&Path>,
) -> Result<PathBuf, CliError> {
    let model = embeddings::read_embeddings_bin(&config.embeddings_bin_path(), None)?;
    if model.row_of(source).is_none() {
        let suggestions = prefix_suggestions(model.labels(), source, 5);
        let hint = if suggestions.is_empty() {
            String::new()
        } else {
            format!("; nearest by prefix: {}", suggestions.join(", "))
        };
        return Err(CliError::data(format!(
            "source not in vocabulary: {source}{hint}"
        )));
    }

    let candidates: Vec<String> = match target_type {
        Some(type_name) => {
            let graph = load_cached_graph(config)?;
            let ty = graph
                .registry()
                .node_type_id(type_name)
                .ok_or_else(|| CliError::data(format!("unknown node type: {type_name}")))?;
            model
                .labels()
                .iter()
                .filter(|l| l.as_str() != source)
                .filter(|l| {
                    graph
                        .node_id(l)
                        .and_then(|n| graph.node_type(n))
                        .is_some_and(|t| t == ty)
                })
                .cloned()
                .collect()
        }
        None => model
            .labels()
            .iter()
            .filter(|l| l.as_str() != source)
            .cloned()
            .collect(),
    };
    if candidates.is_empty() {
        return Err(CliError::data("no candidates to rank"));
    }

    let ranked = rank_targets(&model, source, &candidates, k)?;
    config.ensure_output_dir()?;
    let path = output
        .map(Path::to_path_buf)
        .unwrap_or_else(|| config.output_dir().join("ranking.csv"));
    pairs::write_ranking(&ranked, &path)?;
    Ok(path)
}

#[derive(Debug)]
pub struct EvaluateSummary {
    pub baseline_model: PathBuf,
    pub baseline_links: PathBuf,
    pub validation_accuracy: f64,
    pub reports: Vec<PathBuf>,
}

pub fn cmd_evaluate(config: &PipelineConfig) -> Result<EvaluateSummary, CliError> {
    if config.paths.test_sets.is_empty() {
        return Err(CliError::config(
            "evaluate requires at least one entry in paths.test_sets",
        ));
    }
    let feature_mode = FeatureMode::parse(&config.evaluate.feature_mode)?;
    let model = embeddings::read_embeddings_bin(
        &config.embeddings_bin_path(),
        Some(config.train.dim),
    )?;
    let graph = load_cached_graph(config)?;

    let relation = match &config.baseline.relation {
        Some(uri) => Some(
            graph
                .registry()
                .edge_type_id(uri)
                .ok_or_else(|| CliError::config(format!("unknown relation: {uri}")))?,
        ),
        None => None,
    };
    let links = sample_training_links(
        &graph,
        relation,
        config.baseline.n_pos,
        config.baseline.n_neg,
        config.seed,
    )?;

    // Deterministic train/validation split.
    let fraction = config.baseline.train_fraction;
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(CliError::config("train_fraction must be in (0, 1]"));
    }
    let mut order: Vec<usize> = (0..links.len()).collect();
    let mut rng = Rng::from_stream(config.seed, &[STREAM_SPLIT]);
    for i in (1..order.len()).rev() {
        order.swap(i, rng.next_index(i + 1));
    }
    let n_train = ((links.len() as f64 * fraction).round() as usize).clamp(1, links.len());
    let (train_idx, valid_idx) = order.split_at(n_train);

    let select = |indices: &[usize]| -> Result<LabeledPairSet, CliError> {
        let subset = indices
            .iter()
            .map(|&i| links.pairs()[i].clone())
            .collect::<Vec<_>>();
        LabeledPairSet::from_pairs(subset, links.provenance()).map_err(CliError::from)
    };
    let train_set = select(train_idx)?;
    let valid_set = select(valid_idx)?;

    let mut features = Vec::new();
    let mut labels = Vec::new();
    for pair in train_set.pairs() {
        match pair_features(&model, &pair.source, &pair.target, feature_mode) {
            Ok(f) => {
                features.push(f);
                labels.push(pair.label);
            }
            Err(walkrank_core::Error::UnknownNode(_)) => continue,
            Err(e) => return Err(e.into()),
        }
    }
    if features.is_empty() {
        return Err(CliError::data(
            "no evaluable pairs in the baseline training split",
        ));
    }
    let fit_config = FitConfig {
        l2: config.baseline.l2,
        learning_rate: config.baseline.learning_rate,
        max_epochs: config.baseline.max_epochs,
        tolerance: config.baseline.tolerance,
    };
    let (logreg, _trace) = fit_logreg(&features, &labels, &fit_config)?;

    // Validation metrics for the run log.
    let validation_accuracy = if valid_set.is_empty() {
        f64::NAN
    } else {
        let mut decisions = Vec::new();
        let mut skipped = 0u64;
        for pair in valid_set.pairs() {
            match pair_features(&model, &pair.source, &pair.target, feature_mode) {
                Ok(f) => {
                    let (_, hard) = predict_logreg(&logreg, &f)?;
                    decisions.push((pair.source.as_str(), pair.target.as_str(), hard));
                }
                Err(walkrank_core::Error::UnknownNode(_)) => skipped += 1,
                Err(e) => return Err(e.into()),
            }
        }
        if decisions.is_empty() {
            f64::NAN
        } else {
            metrics(&confusion(decisions, skipped, &valid_set)?)?.accuracy
        }
    };

    config.ensure_output_dir()?;
    let strategy_label = config.walk.strategy.clone();
    let baseline_model = config
        .output_dir()
        .join(format!("baseline_{strategy_label}.txt"));
    baseline::save_logreg(&logreg, &baseline_model)?;
    let baseline_links = config.output_dir().join("baseline_links.csv");
    pairs::write_labeled_pairs(&links, &baseline_links)?;

    let mut reports = Vec::new();
    for test_path in &config.paths.test_sets {
        let pair_set = pairs::load_labeled_pairs_file(test_path)?;
        let stem = test_path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("test_set");
        let report = compare_report(
            &model,
            &pair_set,
            &config.evaluate.k_values,
            &logreg,
            feature_mode,
            &strategy_label,
        )?;
        let csv_path = config.output_dir().join(format!("report_{stem}.csv"));
        std::fs::write(&csv_path, report.to_csv()).map_err(|e| io_err(&csv_path, e))?;
        let text_path = config.output_dir().join(format!("report_{stem}.txt"));
        std::fs::write(&text_path, report.to_text()).map_err(|e| io_err(&text_path, e))?;
        for &k in &config.evaluate.k_values {
            let preds = walkrank_core::rank::predict_topk(&model, &pair_set, k)?;
            let pred_path = config
                .output_dir()
                .join(format!("predictions_{stem}_k{k}.csv"));
            pairs::write_predictions(&preds, &pred_path)?;
            reports.push(pred_path);
        }
        reports.push(csv_path);
        reports.push(text_path);
    }

    Ok(EvaluateSummary {
        baseline_model,
        baseline_links,
        validation_accuracy,
        reports,
    })
}

pub fn cmd_inspect(config: &PipelineConfig) -> Result<String, CliError> {
    let mut out = String::new();
    let cache = config.graph_cache_path();
    let emb = config.embeddings_bin_path();
    let mut found = false;

    if cache.exists() {
        found = true;
        let graph = graph_cache::load_graph(&cache)?;
        let _ = writeln!(out, "graph: {}", cache.display());
        let _ = writeln!(
            out,
            "  nodes: {}  edges: {}  node types: {}  edge types: {}",
            graph.node_count(),
            graph.edge_count(),
            graph.registry().node_type_count(),
            graph.registry().edge_type_count()
        );
        let stats = graph.stats();
        let _ = writeln!(
            out,
            "  ingest: {} lines, {} duplicates dropped, {} self-loops dropped",
            stats.lines_read, stats.duplicates_dropped, stats.self_loops_dropped
        );
        let mut counts = vec![0usize; graph.registry().node_type_count()];
        for &ty in graph.node_types() {
            counts[ty as usize] += 1;
        }
        for (i, name) in graph.registry().node_type_names().iter().enumerate() {
            let _ = writeln!(out, "  type {name}: {} nodes", counts[i]);
        }
        let degrees: Vec<usize> = (0..graph.node_count() as u32)
            .map(|n| graph.degree(n).unwrap_or(0))
            .collect();
        let max = degrees.iter().copied().max().unwrap_or(0);
        let min = degrees.iter().copied().min().unwrap_or(0);
        let mean = degrees.iter().sum::<usize>() as f64 / degrees.len().max(1) as f64;
        let _ = writeln!(out, "  degree: min {min}, mean {mean:.2}, max {max}");
    }

    if emb.exists() {
        found = true;
        let model = embeddings::read_embeddings_bin(&emb, None)?;
        let _ = writeln!(out, "embeddings: {}", emb.display());
        let _ = writeln!(out, "  rows: {}  dim: {}", model.rows(), model.dim());
        let norms: Vec<f64> = (0..model.rows() as u32)
            .map(|r| {
                let v = model.center_row(r).unwrap();
                walkrank_core::math::sqrt(v.iter().map(|x| x * x).sum())
            })
            .collect();
        let mean = norms.iter().sum::<f64>() / norms.len().max(1) as f64;
        let _ = writeln!(out, "  mean center-vector norm: {mean:.4}");
    }

    if !found {
        return Err(CliError::data(format!(
            "nothing to inspect: neither {} nor {} exists",
            cache.display(),
            emb.display()
        )));
    }
    Ok(out)
}
