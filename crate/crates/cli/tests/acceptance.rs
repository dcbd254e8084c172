//! Acceptance suite: one test per criterion, each printing a PASS line
//! (visible with `--nocapture`) with the measured values.
//!
//! Run with: cargo test -p walkrank --test acceptance -- --nocapture

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::OnceLock;
use std::time::Instant;

use walkrank::commands;
use walkrank::config::PipelineConfig;
use walkrank::io::{embeddings as embeddings_io, graph_cache};
use walkrank_core::eval::{confusion, metrics, ConfusionCounts, LabeledPair, LabeledPairSet};
use walkrank_core::graph::{ingest_triples, HeteroGraph};
use walkrank_core::logreg::{
    fit_logreg, pair_features, predict_logreg, sample_training_links, FeatureMode, FitConfig,
};
use walkrank_core::rank::{cosine, predict_topk, rank_targets};
use walkrank_core::rng::Rng;
use walkrank_core::train::{sgd_step, train, EmbeddingMatrix, TrainConfig};
use walkrank_core::vocab::{build_noise_table, build_vocab, NOISE_POWER};
use walkrank_core::walk::{generate_corpus, Metapath, Strategy, WalkConfig};
use walkrank_core::TypeRuleSet;

// ---------------------------------------------------------------------------
// Criterion 1: analytic skip-gram gradients match central finite differences
// (h = 1e-6) with relative error < 1e-4 over 100 random configurations at
// d in {2, 4, 8}; runtime < 5 s.
// ---------------------------------------------------------------------------
#[test]
fn c01_gradient_oracle() {
    let start = Instant::now();
    let h = 1e-6;
    let mut rng = Rng::from_seed(0xC1);
    let mut worst: f64 = 0.0;
    let mut configs = 0;
    for &dim in &[2usize, 4, 8] {
        let runs = if dim == 2 { 34 } else { 33 };
        for _ in 0..runs {
            configs += 1;
            let rows = 5; // center 0, context 1, negatives 2..4
            let negatives = [2u32, 3, 4];
            let center: Vec<f64> = (0..rows * dim).map(|_| rng.next_f64() - 0.5).collect();
            let context: Vec<f64> = (0..rows * dim).map(|_| rng.next_f64() - 0.5).collect();
            let labels: Vec<String> = (0..rows).map(|i| format!("n{i}")).collect();
            let model =
                EmbeddingMatrix::from_parts(labels, dim, center.clone(), Some(context.clone()))
                    .unwrap();

            // Parameter vector [v_c, u_o, u_2, u_3, u_4] for the oracle,
            // an independent implementation of the loss.
            let loss_at = |theta: &[f64]| -> f64 {
                let sigma = |x: f64| 1.0 / (1.0 + (-x).exp());
                let dot =
                    |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
                let vc = &theta[0..dim];
                let mut loss = -sigma(dot(&theta[dim..2 * dim], vc)).ln();
                for k in 0..negatives.len() {
                    let uj = &theta[(2 + k) * dim..(3 + k) * dim];
                    loss += -sigma(-dot(uj, vc)).ln();
                }
                loss
            };
            let mut theta = Vec::new();
            theta.extend_from_slice(&center[0..dim]);
            for row in 1..rows {
                theta.extend_from_slice(&context[row * dim..(row + 1) * dim]);
            }

            // Analytic gradient, recovered from the update deltas at lr = 1.
            let mut updated = model.clone();
            sgd_step(&mut updated, 0, 1, &negatives, 1.0).unwrap();
            let mut analytic = Vec::new();
            for d in 0..dim {
                analytic.push(model.center_data()[d] - updated.center_data()[d]);
            }
            for row in 1..rows {
                for d in 0..dim {
                    let i = row * dim + d;
                    analytic.push(model.context_data()[i] - updated.context_data()[i]);
                }
            }

            let mut fd_norm = 0.0;
            let mut err_norm = 0.0;
            for i in 0..theta.len() {
                let mut plus = theta.clone();
                plus[i] += h;
                let mut minus = theta.clone();
                minus[i] -= h;
                let fd = (loss_at(&plus) - loss_at(&minus)) / (2.0 * h);
                fd_norm += fd * fd;
                err_norm += (analytic[i] - fd) * (analytic[i] - fd);
            }
            let rel = (err_norm / fd_norm.max(1e-30)).sqrt();
            assert!(rel < 1e-4, "dim {dim}: relative error {rel}");
            worst = worst.max(rel);
        }
    }
    let elapsed = start.elapsed();
    assert_eq!(configs, 100);
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}");
    println!(
        "ACCEPT c01 gradient-oracle: PASS (100 configs, worst rel err {worst:.2e}, {elapsed:?})"
    );
}

// ---------------------------------------------------------------------------
// Criterion 2: node2vec empirical second-order step frequencies on a fully
// enumerable graph match analytic normalized 1/p, 1, 1/q probabilities
// within +-0.01 absolute at >= 1e5 samples per conditioned pair, for
// (p, q) in {(1,1), (0.25,4), (4,0.25)}; runtime < 10 s.
// ---------------------------------------------------------------------------
#[test]
fn c02_walk_distribution_oracle() {
    let start = Instant::now();
    // Triangle a-b-c plus tail a-d: 4 nodes, small enough to enumerate.
    let text = "<w/n/a> <p> <w/n/b> .\n<w/n/b> <p> <w/n/c> .\n<w/n/c> <p> <w/n/a> .\n<w/n/a> <p> <w/n/d> .";
    let graph = ingest_triples(text.lines(), TypeRuleSet::empty()).unwrap();
    let n = graph.node_count() as u32;

    // Independent adjacency for the analytic side.
    let mut adjacent: HashSet<(u32, u32)> = HashSet::new();
    for u in 0..n {
        for &(v, _) in graph.neighbors(u).unwrap() {
            adjacent.insert((u, v));
        }
    }
    let mut max_dev: f64 = 0.0;
    let mut min_samples = u64::MAX;

    for &(p, q) in &[(1.0, 1.0), (0.25, 4.0), (4.0, 0.25)] {
        let config = WalkConfig {
            strategy: Strategy::Node2vec,
            p,
            q,
            walk_length: 50,
            walks_per_node: 12_000,
            seed: 0xC2 ^ p.to_bits() ^ q.to_bits(),
            ..WalkConfig::default()
        };
        let corpus = generate_corpus(&graph, &config).unwrap();

        // Empirical second-order transition counts, conditioned on
        // (prev, curr); the first step of each walk has no prev.
        let mut counts: HashMap<(u32, u32), HashMap<u32, u64>> = HashMap::new();
        for walk in &corpus.walks {
            for i in 1..walk.len().saturating_sub(1) {
                *counts
                    .entry((walk[i - 1], walk[i]))
                    .or_default()
                    .entry(walk[i + 1])
                    .or_default() += 1;
            }
        }

        for (&(prev, curr), nexts) in &counts {
            let total: u64 = nexts.values().sum();
            assert!(
                total >= 100_000,
                "only {total} samples for pair ({prev}, {curr})"
            );
            min_samples = min_samples.min(total);
            // Analytic probabilities straight from the weight rule.
            let neighbors: Vec<u32> =
                graph.neighbors(curr).unwrap().iter().map(|&(v, _)| v).collect();
            let weights: Vec<f64> = neighbors
                .iter()
                .map(|&cand| {
                    if cand == prev {
                        1.0 / p
                    } else if adjacent.contains(&(prev, cand)) {
                        1.0
                    } else {
                        1.0 / q
                    }
                })
                .collect();
            let weight_sum: f64 = weights.iter().sum();
            for (cand, w) in neighbors.iter().zip(&weights) {
                let expected = w / weight_sum;
                let observed =
                    *nexts.get(cand).unwrap_or(&0) as f64 / total as f64;
                let dev = (observed - expected).abs();
                assert!(
                    dev < 0.01,
                    "(p={p}, q={q}) pair ({prev},{curr})->{cand}: {observed} vs {expected}"
                );
                max_dev = max_dev.max(dev);
            }
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}");
    println!(
        "ACCEPT c02 walk-distribution-oracle: PASS (max deviation {max_dev:.4}, min samples {min_samples}, {elapsed:?})"
    );
}

// ---------------------------------------------------------------------------
// Criterion 3: for a 10-entry vocabulary, 1e6 noise-table draws match
// P(w) proportional to f^0.75 within +-0.005 absolute per entry.
// ---------------------------------------------------------------------------
#[test]
fn c03_noise_table_oracle() {
    // Skewed counts over ten nodes.
    let walks: Vec<Vec<u32>> = (0..10u32)
        .map(|node| vec![node; 2 + (node as usize * node as usize)])
        .collect();
    let corpus = walkrank_core::walk::WalkCorpus {
        walks,
        strategy: Strategy::Uniform,
        seed: 0,
        config_hash: 0,
        truncated_walks: 0,
        zero_weight_fallbacks: 0,
    };
    let vocab = build_vocab(&corpus, 1).unwrap();
    let table = build_noise_table(&vocab, NOISE_POWER);

    // Independent expected distribution.
    let total_weight: f64 = vocab.counts().iter().map(|&c| (c as f64).powf(0.75)).sum();

    let mut rng = Rng::from_seed(0xC3);
    let draws = 1_000_000u64;
    let mut observed = [0u64; 10];
    for _ in 0..draws {
        observed[table.sample(&mut rng) as usize] += 1;
    }
    let mut max_dev: f64 = 0.0;
    for (row, &count) in observed.iter().enumerate() {
        let expected = (vocab.counts()[row] as f64).powf(0.75) / total_weight;
        let freq = count as f64 / draws as f64;
        let dev = (freq - expected).abs();
        assert!(dev < 0.005, "row {row}: {freq} vs {expected}");
        max_dev = max_dev.max(dev);
    }
    println!("ACCEPT c03 noise-table-oracle: PASS (1e6 draws, max deviation {max_dev:.5})");
}

// ---------------------------------------------------------------------------
// Criterion 4: 100% of walks from a metapath corpus satisfy the cyclic
// type pattern (brute-force scan).
// ---------------------------------------------------------------------------
#[test]
fn c04_metapath_conformance() {
    let mut text = String::new();
    // Compounds bind genes; genes associate with diseases; diseases link
    // back to compounds, so walks have off-pattern neighbors to avoid.
    for c in 0..5 {
        for g in 0..6 {
            if (c + g) % 2 == 0 {
                text.push_str(&format!("<m/compound/c{c}> <binds> <m/gene/g{g}> .\n"));
            }
        }
    }
    for g in 0..6 {
        text.push_str(&format!("<m/gene/g{g}> <assoc> <m/disease/d{}> .\n", g % 3));
    }
    for d in 0..3 {
        text.push_str(&format!("<m/disease/d{d}> <treats> <m/compound/c{d}> .\n"));
    }
    let graph = ingest_triples(text.lines(), TypeRuleSet::empty()).unwrap();
    let pattern =
        Metapath::from_names(graph.registry(), &["compound", "gene", "compound"]).unwrap();
    let config = WalkConfig {
        strategy: Strategy::Metapath,
        metapath: Some(pattern.clone()),
        walk_length: 21,
        walks_per_node: 50,
        seed: 0xC4,
        ..WalkConfig::default()
    };
    let corpus = generate_corpus(&graph, &config).unwrap();
    assert!(!corpus.walks.is_empty());
    let mut positions = 0u64;
    for walk in &corpus.walks {
        for (i, &node) in walk.iter().enumerate() {
            assert_eq!(
                graph.node_type(node),
                Some(pattern.expected_type(i)),
                "walk {walk:?} violates the pattern at position {i}"
            );
            positions += 1;
        }
    }
    println!(
        "ACCEPT c04 metapath-conformance: PASS ({} walks, {positions} positions, 100% conform)",
        corpus.walks.len()
    );
}

// ---------------------------------------------------------------------------
// Planted-partition benchmark shared by criteria 5 and 6: two communities
// of 100 nodes (intra-edge prob 0.1, inter 0.01, fixed seed), 10% of
// intra-community edges held out as positives plus an equal number of
// inter-community non-edges as negatives; default node2vec training.
// ---------------------------------------------------------------------------
struct Planted {
    graph: HeteroGraph,
    model: EmbeddingMatrix,
    eval: LabeledPairSet,
    build_seconds: f64,
}

static PLANTED: OnceLock<Planted> = OnceLock::new();

fn community(node: &str) -> char {
    if node.contains("/a") {
        'a'
    } else {
        'b'
    }
}

fn planted() -> &'static Planted {
    PLANTED.get_or_init(|| {
        let start = Instant::now();
        let n = 100usize;
        let name = |c: char, i: usize| format!("syn://node/{c}{i}");
        let mut rng = Rng::from_seed(20260808);

        let mut intra: Vec<(String, String)> = Vec::new();
        for c in ['a', 'b'] {
            for i in 0..n {
                for j in (i + 1)..n {
                    if rng.next_f64() < 0.1 {
                        intra.push((name(c, i), name(c, j)));
                    }
                }
            }
        }
        let mut inter: Vec<(String, String)> = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if rng.next_f64() < 0.01 {
                    inter.push((name('a', i), name('b', j)));
                }
            }
        }

        // Hold out 10% of intra-community edges as eval positives.
        let canon = |u: &str, v: &str| {
            if u <= v {
                (u.to_string(), v.to_string())
            } else {
                (v.to_string(), u.to_string())
            }
        };
        let mut full_edges: HashSet<(String, String)> = HashSet::new();
        for (u, v) in intra.iter().chain(&inter) {
            full_edges.insert(canon(u, v));
        }
        let held_out: Vec<(String, String)> = intra
            .iter()
            .enumerate()
            .filter(|(k, _)| k % 10 == 0)
            .map(|(_, e)| e.clone())
            .collect();

        let mut triples = String::new();
        for (k, (u, v)) in intra.iter().enumerate() {
            if k % 10 != 0 {
                triples.push_str(&format!("<{u}> <syn://rel/intra> <{v}> .\n"));
            }
        }
        for (u, v) in &inter {
            triples.push_str(&format!("<{u}> <syn://rel/inter> <{v}> .\n"));
        }
        let graph = ingest_triples(triples.lines(), TypeRuleSet::empty()).unwrap();

        // One inter-community non-edge negative per held-out positive,
        // sharing the positive's source so every group has a positive.
        let mut chosen: HashSet<(String, String)> = HashSet::new();
        let mut pairs: Vec<LabeledPair> = Vec::new();
        for (u, v) in &held_out {
            pairs.push(LabeledPair {
                source: u.clone(),
                target: v.clone(),
                label: 1,
            });
            let other = if community(u) == 'a' { 'b' } else { 'a' };
            loop {
                let w = name(other, rng.next_index(n));
                let key = canon(u, &w);
                if full_edges.contains(&key) || chosen.contains(&key) {
                    continue;
                }
                chosen.insert(key);
                pairs.push(LabeledPair {
                    source: u.clone(),
                    target: w,
                    label: 0,
                });
                break;
            }
        }
        let eval = LabeledPairSet::from_pairs(pairs, "planted-partition holdout").unwrap();

        // Default node2vec training: walk length 20, 10 walks per node,
        // d = 128, window 5, 5 negatives, 5 epochs.
        let walk_config = WalkConfig {
            strategy: Strategy::Node2vec,
            seed: 20260808,
            ..WalkConfig::default()
        };
        let corpus = generate_corpus(&graph, &walk_config).unwrap();
        let train_config = TrainConfig {
            seed: 20260808,
            ..TrainConfig::default()
        };
        let (model, _) = train(&corpus, graph.uris(), &train_config).unwrap();

        Planted {
            graph,
            model,
            eval,
            build_seconds: start.elapsed().as_secs_f64(),
        }
    })
}

// ---------------------------------------------------------------------------
// Criterion 5: on the planted benchmark, (a) mean cosine of held-out
// positives exceeds mean cosine of negatives, and (b) predict_topk at
// K = per-source positive count reaches F1 >= 0.7; total runtime < 3 min.
// ---------------------------------------------------------------------------
#[test]
fn c05_planted_structure_recovery() {
    let start = Instant::now();
    let bench = planted();

    let mut pos_scores = Vec::new();
    let mut neg_scores = Vec::new();
    for pair in bench.eval.pairs() {
        let a = bench.model.vector(&pair.source).expect("embedded");
        let b = bench.model.vector(&pair.target).expect("embedded");
        let score = cosine(a, b).unwrap();
        if pair.label == 1 {
            pos_scores.push(score);
        } else {
            neg_scores.push(score);
        }
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (pos_mean, neg_mean) = (mean(&pos_scores), mean(&neg_scores));
    assert!(
        pos_mean > neg_mean,
        "positive mean {pos_mean} vs negative mean {neg_mean}"
    );

    // Per-source K = that source's positive count.
    let mut groups: BTreeMap<&str, Vec<LabeledPair>> = BTreeMap::new();
    for pair in bench.eval.pairs() {
        groups.entry(pair.source.as_str()).or_default().push(pair.clone());
    }
    let mut total = ConfusionCounts::default();
    for (_, group) in groups {
        let k = group.iter().filter(|p| p.label == 1).count();
        assert!(k >= 1);
        let subset = LabeledPairSet::from_pairs(group, "group").unwrap();
        let preds = predict_topk(&bench.model, &subset, k).unwrap();
        let counts = confusion(preds.decisions(), preds.skipped.len() as u64, &subset).unwrap();
        total.true_positives += counts.true_positives;
        total.false_positives += counts.false_positives;
        total.true_negatives += counts.true_negatives;
        total.false_negatives += counts.false_negatives;
        total.skipped += counts.skipped;
    }
    let m = metrics(&total).unwrap();
    assert!(m.f1 >= 0.7, "F1 {} (counts {total:?})", m.f1);

    let elapsed = bench.build_seconds + start.elapsed().as_secs_f64();
    assert!(elapsed < 180.0, "took {elapsed}s");
    println!(
        "ACCEPT c05 planted-structure-recovery: PASS (cosine margin {:.3} vs {:.3}, F1 {:.3}, {:.1}s)",
        pos_mean, neg_mean, m.f1, elapsed
    );
}

// ---------------------------------------------------------------------------
// Criterion 6: method agreement on the planted benchmark —
// |accuracy(topK at the best K) - accuracy(logreg)| <= 0.1.
// ---------------------------------------------------------------------------
#[test]
fn c06_method_agreement() {
    let bench = planted();

    // Baseline trained on links sampled from the training graph.
    let links = sample_training_links(&bench.graph, None, 400, 400, 0xC6).unwrap();
    let mode = FeatureMode::Hadamard;
    let mut features = Vec::new();
    let mut labels = Vec::new();
    for pair in links.pairs() {
        features.push(pair_features(&bench.model, &pair.source, &pair.target, mode).unwrap());
        labels.push(pair.label);
    }
    let (baseline, _) = fit_logreg(&features, &labels, &FitConfig::default()).unwrap();

    let mut decisions = Vec::new();
    for pair in bench.eval.pairs() {
        let f = pair_features(&bench.model, &pair.source, &pair.target, mode).unwrap();
        let (_, hard) = predict_logreg(&baseline, &f).unwrap();
        decisions.push((pair.source.as_str(), pair.target.as_str(), hard));
    }
    let logreg_acc = metrics(&confusion(decisions, 0, &bench.eval).unwrap())
        .unwrap()
        .accuracy;

    let mut best_topk_acc: f64 = 0.0;
    let mut best_k = 0;
    for k in [1usize, 2, 3, 5, 10] {
        let preds = predict_topk(&bench.model, &bench.eval, k).unwrap();
        let acc = metrics(&confusion(preds.decisions(), preds.skipped.len() as u64, &bench.eval).unwrap())
            .unwrap()
            .accuracy;
        if acc > best_topk_acc {
            best_topk_acc = acc;
            best_k = k;
        }
    }

    let gap = (best_topk_acc - logreg_acc).abs();
    assert!(
        gap <= 0.1,
        "topK accuracy {best_topk_acc} (K={best_k}) vs logreg {logreg_acc}"
    );
    println!(
        "ACCEPT c06 method-agreement: PASS (topK@{best_k} accuracy {best_topk_acc:.4}, logreg {logreg_acc:.4}, gap {gap:.4})"
    );
}

// ---------------------------------------------------------------------------
// Criterion 7: recall at K=100 >= recall at K=50 >= recall at K=10 on a
// fixed model and pair set (exact, no tolerance).
// ---------------------------------------------------------------------------
#[test]
fn c07_recall_monotonicity() {
    // Random embeddings, 4 sources x 150 labeled candidates each.
    let mut rng = Rng::from_seed(0xC7);
    let dim = 8;
    let mut labels = Vec::new();
    let mut center = Vec::new();
    for s in 0..4 {
        labels.push(format!("r/src/{s}"));
        center.extend((0..dim).map(|_| rng.next_f64() - 0.5));
    }
    for t in 0..150 {
        labels.push(format!("r/cand/{t}"));
        center.extend((0..dim).map(|_| rng.next_f64() - 0.5));
    }
    let model = EmbeddingMatrix::from_parts(labels, dim, center, None).unwrap();

    let mut pairs = Vec::new();
    for s in 0..4 {
        for t in 0..150 {
            pairs.push(LabeledPair {
                source: format!("r/src/{s}"),
                target: format!("r/cand/{t}"),
                label: (rng.next_u64() & 1) as u8,
            });
        }
    }
    let set = LabeledPairSet::from_pairs(pairs, "random").unwrap();

    let recall_at = |k: usize| -> f64 {
        let preds = predict_topk(&model, &set, k).unwrap();
        metrics(&confusion(preds.decisions(), preds.skipped.len() as u64, &set).unwrap())
            .unwrap()
            .recall
    };
    let (r10, r50, r100) = (recall_at(10), recall_at(50), recall_at(100));
    assert!(r50 >= r10, "recall@50 {r50} < recall@10 {r10}");
    assert!(r100 >= r50, "recall@100 {r100} < recall@50 {r50}");

    // Also holds on the planted benchmark's pair set.
    let bench = planted();
    let bench_recall = |k: usize| -> f64 {
        let preds = predict_topk(&bench.model, &bench.eval, k).unwrap();
        metrics(&confusion(preds.decisions(), preds.skipped.len() as u64, &bench.eval).unwrap())
            .unwrap()
            .recall
    };
    let (b10, b50, b100) = (bench_recall(10), bench_recall(50), bench_recall(100));
    assert!(b50 >= b10 && b100 >= b50);
    println!(
        "ACCEPT c07 recall-monotonicity: PASS (random {r10:.4} <= {r50:.4} <= {r100:.4}; planted {b10:.4} <= {b50:.4} <= {b100:.4})"
    );
}

// ---------------------------------------------------------------------------
// Criterion 8: two single-worker runs with identical config and seed
// produce byte-identical corpora, embeddings, rankings, and reports.
// ---------------------------------------------------------------------------
#[test]
fn c08_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path();

    // Bipartite graph with spare non-edges so evaluate can sample.
    let triples_path = base.join("triples.nt");
    let mut triples = String::new();
    for c in 0..8 {
        for g in 0..10 {
            if (3 * c + 5 * g) % 7 < 4 {
                triples.push_str(&format!("<d/compound/c{c}> <binds> <d/gene/g{g}> .\n"));
            }
        }
    }
    std::fs::write(&triples_path, triples).unwrap();

    let pairs_path = base.join("pairs.csv");
    let mut csv = String::from("source,target,label\n");
    for (c, g, label) in [(0, 0, 1), (0, 3, 0), (1, 2, 1), (2, 6, 1), (2, 1, 0), (3, 4, 0)] {
        csv.push_str(&format!("d/compound/c{c},d/gene/g{g},{label}\n"));
    }
    std::fs::write(&pairs_path, csv).unwrap();

    let mut config = PipelineConfig {
        seed: 4242,
        ..PipelineConfig::default()
    };
    config.paths.triples = triples_path;
    config.paths.test_sets = vec![pairs_path];
    config.paths.output_dir = base.join("out");
    config.walk.strategy = "node2vec".to_string();
    config.walk.walk_length = 12;
    config.walk.walks_per_node = 8;
    config.train.dim = 16;
    config.train.epochs = 3;
    config.train.window = 3;
    config.baseline.n_pos = 15;
    config.baseline.n_neg = 15;
    config.evaluate.k_values = vec![1, 2, 4];

    let source = "d/compound/c0";
    let run_all = || {
        commands::cmd_ingest(&config).unwrap();
        commands::cmd_walk(&config).unwrap();
        commands::cmd_train(&config).unwrap();
        commands::cmd_rank(&config, source, 5, None, None).unwrap();
        commands::cmd_evaluate(&config).unwrap();
    };

    let artifacts = [
        "graph.bin",
        "corpus_node2vec.txt",
        "embeddings_node2vec.bin",
        "embeddings_node2vec.txt",
        "manifest_node2vec.txt",
        "ranking.csv",
        "report_pairs.csv",
        "report_pairs.txt",
        "predictions_pairs_k1.csv",
        "baseline_node2vec.txt",
        "baseline_links.csv",
    ];

    run_all();
    let first: Vec<Vec<u8>> = artifacts
        .iter()
        .map(|name| std::fs::read(config.paths.output_dir.join(name)).unwrap())
        .collect();
    run_all();
    for (name, before) in artifacts.iter().zip(&first) {
        let after = std::fs::read(config.paths.output_dir.join(name)).unwrap();
        assert_eq!(&after, before, "artifact {name} changed between runs");
    }
    println!(
        "ACCEPT c08 determinism: PASS ({} artifacts byte-identical across two runs)",
        artifacts.len()
    );
}

// ---------------------------------------------------------------------------
// Criterion 9: binary save/load of embeddings and graph cache is
// bit-exact; the text embedding round-trip reproduces every float exactly.
// ---------------------------------------------------------------------------
#[test]
fn c09_persistence_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let bench = planted();

    // Graph cache: save -> load -> save reproduces the bytes.
    let g1 = dir.path().join("g1.bin");
    let g2 = dir.path().join("g2.bin");
    graph_cache::save_graph(&bench.graph, &g1).unwrap();
    let loaded = graph_cache::load_graph(&g1).unwrap();
    graph_cache::save_graph(&loaded, &g2).unwrap();
    assert_eq!(std::fs::read(&g1).unwrap(), std::fs::read(&g2).unwrap());

    // Binary embeddings: bit-exact.
    let e1 = dir.path().join("e1.bin");
    let e2 = dir.path().join("e2.bin");
    embeddings_io::write_embeddings_bin(&bench.model, &e1, true).unwrap();
    let loaded = embeddings_io::read_embeddings_bin(&e1, Some(bench.model.dim())).unwrap();
    embeddings_io::write_embeddings_bin(&loaded, &e2, true).unwrap();
    assert_eq!(std::fs::read(&e1).unwrap(), std::fs::read(&e2).unwrap());

    // Text embeddings: every float identical after a round trip.
    let t1 = dir.path().join("e.txt");
    embeddings_io::write_embeddings_text(&bench.model, &t1).unwrap();
    let text_loaded = embeddings_io::read_embeddings_text(&t1).unwrap();
    assert_eq!(text_loaded.labels(), bench.model.labels());
    let bits = |m: &EmbeddingMatrix| -> Vec<u64> {
        m.center_data().iter().map(|v| v.to_bits()).collect()
    };
    assert_eq!(bits(&text_loaded), bits(&bench.model));
    println!(
        "ACCEPT c09 persistence-round-trip: PASS (graph cache, binary + text embeddings, {} rows x {} dims)",
        bench.model.rows(),
        bench.model.dim()
    );
}

// ---------------------------------------------------------------------------
// Criterion 10: metrics(confusion(.)) equals independent brute-force
// tallies on 100 randomized instances of up to 1e4 pairs.
// ---------------------------------------------------------------------------
#[test]
fn c10_metrics_oracle() {
    let mut rng = Rng::from_seed(0xC10);
    for instance in 0..100 {
        let n = 10 + rng.next_index(9_991); // up to 1e4 pairs
        let mut pairs = Vec::with_capacity(n);
        let mut predicted = Vec::with_capacity(n);
        for i in 0..n {
            pairs.push(LabeledPair {
                source: format!("s{}", i / 7),
                target: format!("t{i}"),
                label: (rng.next_u64() & 1) as u8,
            });
            predicted.push(rng.next_u64() & 1 == 1);
        }
        let set = LabeledPairSet::from_pairs(pairs.clone(), "oracle").unwrap();
        let decisions: Vec<(&str, &str, bool)> = pairs
            .iter()
            .zip(&predicted)
            .map(|(p, &d)| (p.source.as_str(), p.target.as_str(), d))
            .collect();
        let counts = confusion(decisions, 0, &set).unwrap();
        let m = metrics(&counts).unwrap();

        // Brute-force tally, written independently of the library path.
        let (mut tp, mut fp, mut tn, mut fnn) = (0u64, 0u64, 0u64, 0u64);
        for (pair, &d) in pairs.iter().zip(&predicted) {
            match (d, pair.label) {
                (true, 1) => tp += 1,
                (true, _) => fp += 1,
                (false, 0) => tn += 1,
                (false, _) => fnn += 1,
            }
        }
        assert_eq!(
            (counts.true_positives, counts.false_positives, counts.true_negatives, counts.false_negatives),
            (tp, fp, tn, fnn),
            "instance {instance}"
        );
        let accuracy = (tp + tn) as f64 / n as f64;
        let precision = if tp + fp > 0 { tp as f64 / (tp + fp) as f64 } else { 0.0 };
        let recall = if tp + fnn > 0 { tp as f64 / (tp + fnn) as f64 } else { 0.0 };
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        assert_eq!(m.accuracy, accuracy, "instance {instance}");
        assert_eq!(m.precision, precision, "instance {instance}");
        assert_eq!(m.recall, recall, "instance {instance}");
        assert_eq!(m.f1, f1, "instance {instance}");
    }
    println!("ACCEPT c10 metrics-oracle: PASS (100 randomized instances up to 1e4 pairs)");
}

// ---------------------------------------------------------------------------
// Criterion 11: per-vector positive rescaling leaves every ranking's
// argsort unchanged (exact), and cosine(v, v) = 1 within 1e-12.
// ---------------------------------------------------------------------------
#[test]
fn c11_cosine_invariance() {
    let mut rng = Rng::from_seed(0xC11);
    let dim = 16;
    let n = 60;
    let mut labels = vec!["src".to_string()];
    let mut center: Vec<f64> = (0..dim).map(|_| rng.next_f64() - 0.5).collect();
    for i in 0..n {
        labels.push(format!("cand/{i:03}"));
        center.extend((0..dim).map(|_| rng.next_f64() - 0.5));
    }
    let model = EmbeddingMatrix::from_parts(labels.clone(), dim, center.clone(), None).unwrap();

    // Power-of-two per-vector scales are exact in IEEE arithmetic, so the
    // argsort equality is exact, not approximate.
    let mut scaled = center.clone();
    for (row, chunk) in scaled.chunks_mut(dim).enumerate() {
        let factor = (2.0f64).powi((row as i32 % 13) - 6);
        for x in chunk {
            *x *= factor;
        }
    }
    let scaled_model = EmbeddingMatrix::from_parts(labels, dim, scaled, None).unwrap();

    let candidates: Vec<String> = (0..n).map(|i| format!("cand/{i:03}")).collect();
    let plain = rank_targets(&model, "src", &candidates, n).unwrap();
    let rescaled = rank_targets(&scaled_model, "src", &candidates, n).unwrap();
    let order = |l: &walkrank_core::rank::RankedList| -> Vec<String> {
        l.entries.iter().map(|e| e.target.clone()).collect()
    };
    assert_eq!(order(&plain), order(&rescaled));

    // cosine(v, v) within 1e-12 of 1 for random vectors.
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let v: Vec<f64> = (0..dim).map(|_| (rng.next_f64() - 0.5) * 10.0).collect();
        let c = cosine(&v, &v).unwrap();
        worst = worst.max((c - 1.0).abs());
        assert!((c - 1.0).abs() < 1e-12, "cosine(v,v) = {c}");
    }
    println!(
        "ACCEPT c11 cosine-invariance: PASS (argsort exact under rescaling, |cos(v,v)-1| <= {worst:.2e})"
    );
}
