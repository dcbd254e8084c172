//! Thread-parallel drivers over the core algorithms.
//!
//! Corpus generation fans (start node, walk number) pairs across threads;
//! because every walk draws from its own RNG substream, the assembled
//! corpus is byte-identical to the serial one.
//!
//! The parallel trainer shards walks across workers that update shared
//! embedding rows through relaxed atomics with no mutual exclusion
//! (conflicting row updates may interleave). With one worker it replays
//! exactly the deterministic trainer's sequence of operations, which the
//! tests pin down bit-for-bit; with several workers the result is
//! accuracy-preserving but run-to-run nondeterministic. The model is read
//! only after every worker has joined.

use std::sync::atomic::{AtomicU64, Ordering};

use walkrank_core::graph::HeteroGraph;
use walkrank_core::math;
use walkrank_core::rng::{stream_seed, Rng};
use walkrank_core::train::{
    decayed_lr, draw_negative, map_walks, window_pair_count, EmbeddingMatrix, TrainConfig,
    TrainStats, STREAM_INIT, STREAM_TRAIN,
};
use walkrank_core::transition::em_train_transition;
use walkrank_core::vocab::{build_noise_table, build_vocab, NoiseTable, NOISE_POWER};
use walkrank_core::walk::{generate_walk, walk_start_nodes, Strategy, WalkConfig, WalkCorpus};
use walkrank_core::Error as CoreError;

use crate::error::CliError;

/// (walks, truncated count, zero-weight fallback count) from one shard.
type ShardWalks = Result<(Vec<Vec<u32>>, u64, u64), CoreError>;

/// Same corpus as `walkrank_core::walk::generate_corpus`, produced by
/// `workers` threads.
pub fn generate_corpus_parallel(
    graph: &HeteroGraph,
    config: &WalkConfig,
    workers: usize,
) -> Result<WalkCorpus, CliError> {
    if workers <= 1 {
        return walkrank_core::walk::generate_corpus(graph, config).map_err(CliError::from);
    }
    config.validate(graph)?;
    let matrix = match config.strategy {
        Strategy::Edge2vec => Some(em_train_transition(graph, config)?),
        _ => None,
    };
    let starts = walk_start_nodes(graph, config)?;
    let walks_per_node = config.walks_per_node;
    let chunk = starts.len().div_ceil(workers);

    let results: Vec<ShardWalks> = std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for piece in starts.chunks(chunk.max(1)) {
            let matrix = matrix.as_ref();
            handles.push(scope.spawn(move || {
                let mut walks = Vec::with_capacity(piece.len() * walks_per_node);
                let mut truncated = 0u64;
                let mut fallbacks = 0u64;
                for &start in piece {
                    for walk_no in 0..walks_per_node as u64 {
                        let outcome = generate_walk(graph, config, matrix, start, walk_no)?;
                        truncated += outcome.truncated as u64;
                        fallbacks += outcome.zero_weight_fallbacks;
                        walks.push(outcome.nodes);
                    }
                }
                Ok((walks, truncated, fallbacks))
            }));
        }
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });

    let mut walks = Vec::with_capacity(starts.len() * walks_per_node);
    let mut truncated = 0u64;
    let mut fallbacks = 0u64;
    for result in results {
        let (piece, t, f) = result?;
        walks.extend(piece);
        truncated += t;
        fallbacks += f;
    }
    Ok(WalkCorpus {
        walks,
        strategy: config.strategy,
        seed: config.seed,
        config_hash: config.config_hash(),
        truncated_walks: truncated,
        zero_weight_fallbacks: fallbacks,
    })
}

/// f64 stored as bits in an atomic; relaxed loads/stores compile to plain
/// moves on mainstream targets.
struct AtomicF64Slice(Vec<AtomicU64>);

impl AtomicF64Slice {
    fn from_vec(values: Vec<f64>) -> Self {
        AtomicF64Slice(values.into_iter().map(|v| AtomicU64::new(v.to_bits())).collect())
    }

    fn into_vec(self) -> Vec<f64> {
        self.0
            .into_iter()
            .map(|a| f64::from_bits(a.into_inner()))
            .collect()
    }

    #[inline]
    fn get(&self, i: usize) -> f64 {
        f64::from_bits(self.0[i].load(Ordering::Relaxed))
    }

    #[inline]
    fn set(&self, i: usize, v: f64) {
        self.0[i].store(v.to_bits(), Ordering::Relaxed);
    }
}

/// One SGD step against the shared matrices; mirrors the deterministic
/// trainer's arithmetic exactly (same math functions, same order).
#[allow(clippy::too_many_arguments, clippy::needless_range_loop)]
fn hogwild_step(
    dim: usize,
    center: &AtomicF64Slice,
    context: &AtomicF64Slice,
    center_row: u32,
    context_row: u32,
    negatives: &[u32],
    lr: f64,
    acc: &mut Vec<f64>,
    gradients: &mut Vec<f64>,
    center_snapshot: &mut Vec<f64>,
) -> f64 {
    let cbase = center_row as usize * dim;
    center_snapshot.clear();
    for d in 0..dim {
        center_snapshot.push(center.get(cbase + d));
    }

    gradients.clear();
    let mut loss;
    {
        let dot_ctx = |row: u32| -> f64 {
            let base = row as usize * dim;
            let mut s = 0.0;
            for d in 0..dim {
                s += context.get(base + d) * center_snapshot[d];
            }
            s
        };
        let x_pos = dot_ctx(context_row);
        loss = -math::ln_sigmoid(x_pos);
        gradients.push(math::sigmoid(x_pos) - 1.0);
        for &j in negatives {
            let x_neg = dot_ctx(j);
            loss += -math::ln_sigmoid(-x_neg);
            gradients.push(math::sigmoid(x_neg));
        }
    }

    acc.clear();
    acc.resize(dim, 0.0);
    for (idx, &g) in gradients.iter().enumerate() {
        let row = if idx == 0 { context_row } else { negatives[idx - 1] };
        let base = row as usize * dim;
        for d in 0..dim {
            acc[d] -= lr * g * context.get(base + d);
        }
        for d in 0..dim {
            context.set(base + d, context.get(base + d) - lr * g * center_snapshot[d]);
        }
    }
    for d in 0..dim {
        center.set(cbase + d, center.get(cbase + d) + acc[d]);
    }
    loss
}

/// Lock-free sharded trainer. With `config.workers == 1` the result is
/// bit-identical to `walkrank_core::train::train`.
pub fn train_parallel(
    corpus: &WalkCorpus,
    uris: &[String],
    config: &TrainConfig,
) -> Result<(EmbeddingMatrix, TrainStats), CliError> {
    config.validate()?;
    let vocab = build_vocab(corpus, config.min_count)?;
    let noise = build_noise_table(&vocab, NOISE_POWER);
    let labels = vocab
        .tokens()
        .iter()
        .map(|&node| {
            uris.get(node as usize)
                .cloned()
                .ok_or(CoreError::NodeOutOfRange {
                    index: node,
                    node_count: uris.len() as u32,
                })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let init = EmbeddingMatrix::init(
        labels,
        config.dim,
        stream_seed(config.seed, &[STREAM_INIT]),
    )?;
    let (dim, label_vec, center_vec, context_vec) = init.into_raw();

    let walks = map_walks(corpus, &vocab);
    let pairs_per_pass: u64 = walks
        .iter()
        .map(|w| window_pair_count(w.len(), config.window))
        .sum();
    let total_pairs = pairs_per_pass * config.epochs as u64;

    let mut stats = TrainStats::default();
    if total_pairs == 0 {
        let model = EmbeddingMatrix::from_parts(label_vec, dim, center_vec, Some(context_vec))?;
        return Ok((model, stats));
    }

    let center = AtomicF64Slice::from_vec(center_vec);
    let context = AtomicF64Slice::from_vec(context_vec);
    let processed = AtomicU64::new(0);
    let skipped = AtomicU64::new(0);
    let workers = config.workers.max(1);
    let chunk = walks.len().div_ceil(workers).max(1);

    for epoch in 0..config.epochs as u64 {
        let epoch_totals: Vec<(f64, u64)> = std::thread::scope(|scope| {
            let mut handles = Vec::new();
            for (shard_no, shard) in walks.chunks(chunk).enumerate() {
                let first_walk_idx = shard_no * chunk;
                let center = &center;
                let context = &context;
                let noise = &noise;
                let processed = &processed;
                let skipped = &skipped;
                handles.push(scope.spawn(move || {
                    worker_epoch(
                        dim,
                        center,
                        context,
                        noise,
                        config,
                        epoch,
                        first_walk_idx,
                        shard,
                        total_pairs,
                        processed,
                        skipped,
                    )
                }));
            }
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        });
        let (loss_sum, pair_sum) = epoch_totals
            .into_iter()
            .fold((0.0, 0u64), |(l, p), (sl, sp)| (l + sl, p + sp));
        stats.pairs_trained += pair_sum;
        stats
            .epoch_mean_loss
            .push(if pair_sum > 0 { loss_sum / pair_sum as f64 } else { 0.0 });
    }
    stats.negatives_skipped = skipped.into_inner();

    let model = EmbeddingMatrix::from_parts(
        label_vec,
        dim,
        center.into_vec(),
        Some(context.into_vec()),
    )?;
    Ok((model, stats))
}

#[allow(clippy::too_many_arguments, clippy::needless_range_loop)]
fn worker_epoch(
    dim: usize,
    center: &AtomicF64Slice,
    context: &AtomicF64Slice,
    noise: &NoiseTable,
    config: &TrainConfig,
    epoch: u64,
    first_walk_idx: usize,
    shard: &[Vec<u32>],
    total_pairs: u64,
    processed: &AtomicU64,
    skipped: &AtomicU64,
) -> (f64, u64) {
    let mut acc: Vec<f64> = Vec::with_capacity(dim);
    let mut gradients: Vec<f64> = Vec::with_capacity(config.negatives + 1);
    let mut snapshot: Vec<f64> = Vec::with_capacity(dim);
    let mut negative_rows: Vec<u32> = Vec::with_capacity(config.negatives);
    let mut loss_sum = 0.0;
    let mut pair_count = 0u64;

    for (offset, walk) in shard.iter().enumerate() {
        if walk.len() < 2 {
            continue;
        }
        let walk_idx = (first_walk_idx + offset) as u64;
        let mut rng = Rng::from_stream(config.seed, &[STREAM_TRAIN, epoch, walk_idx]);
        for t in 0..walk.len() {
            let center_row = walk[t];
            let lo = t.saturating_sub(config.window);
            let hi = (t + config.window).min(walk.len() - 1);
            for ctx in lo..=hi {
                if ctx == t {
                    continue;
                }
                let context_row = walk[ctx];
                negative_rows.clear();
                for _ in 0..config.negatives {
                    match draw_negative(noise, &mut rng, context_row) {
                        Some(row) => negative_rows.push(row),
                        None => {
                            skipped.fetch_add(1, Ordering::Relaxed);
                        }
                    }
                }
                let done = processed.fetch_add(1, Ordering::Relaxed);
                let lr = decayed_lr(config.learning_rate, done, total_pairs);
                loss_sum += hogwild_step(
                    dim,
                    center,
                    context,
                    center_row,
                    context_row,
                    &negative_rows,
                    lr,
                    &mut acc,
                    &mut gradients,
                    &mut snapshot,
                );
                pair_count += 1;
            }
        }
    }
    (loss_sum, pair_count)
}
