//! Skip-gram training with negative sampling.
//!
//! Learns one center vector and one context vector per retained node by
//! stochastic gradient descent on the negative-sampling objective
//! `-[ln sigma(u_o . v_c) + sum_j ln sigma(-u_j . v_c)]`, where the j are
//! drawn from the noise table. Center vectors are the embedding consumers
//! use; context vectors are a training artifact.
//!
//! This module is the deterministic single-worker path. Per-walk RNG
//! substreams keyed by (epoch, walk index) mean a lock-free sharded trainer
//! (see the companion crate) reproduces it bit-for-bit with one worker.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use hashbrown::HashMap;

use crate::error::Error;
use crate::math;
use crate::rng::{fnv1a64, stream_seed, Rng};
use crate::vocab::{build_noise_table, build_vocab, NoiseTable, NOISE_POWER};
use crate::walk::WalkCorpus;

/// Substream tags for initialization, per-walk training draws, and loss
/// evaluation sampling.
pub const STREAM_INIT: u64 = 3;
pub const STREAM_TRAIN: u64 = 4;
pub const STREAM_EVAL: u64 = 5;

/// Learning rate never drops below this fraction of its initial value.
pub const LR_FLOOR_FRACTION: f64 = 1e-4;

/// Attempts to re-draw a negative that collides with the true context
/// before the draw is skipped and counted.
pub const NEGATIVE_REDRAW_CAP: usize = 100;

#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub dim: usize,
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub min_count: u64,
    pub seed: u64,
    /// Worker count for the parallel trainer; the in-crate trainer is the
    /// deterministic single-worker path and ignores values above 1.
    pub workers: usize,
    pub deterministic: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            dim: 128,
            window: 5,
            negatives: 5,
            epochs: 5,
            learning_rate: 0.025,
            min_count: 1,
            seed: 0,
            workers: 1,
            deterministic: true,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), Error> {
        if self.dim < 1 {
            return Err(Error::InvalidConfig("dim must be >= 1".into()));
        }
        if self.window < 1 {
            return Err(Error::InvalidConfig("window must be >= 1".into()));
        }
        if self.negatives < 1 {
            return Err(Error::InvalidConfig("negatives must be >= 1".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidConfig("learning_rate must be > 0".into()));
        }
        if self.workers < 1 {
            return Err(Error::InvalidConfig("workers must be >= 1".into()));
        }
        Ok(())
    }

    pub fn config_hash(&self) -> u64 {
        let canonical = alloc::format!(
            "dim={};window={};negatives={};epochs={};learning_rate={};min_count={};seed={};workers={};deterministic={}",
            self.dim,
            self.window,
            self.negatives,
            self.epochs,
            self.learning_rate,
            self.min_count,
            self.seed,
            self.workers,
            self.deterministic,
        );
        fnv1a64(canonical.as_bytes())
    }
}

/// Center and context vectors, one row per vocabulary entry, plus the URI
/// labels that index them.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    dim: usize,
    labels: Vec<String>,
    label_rows: HashMap<String, u32>,
    center: Vec<f64>,
    context: Vec<f64>,
}

impl EmbeddingMatrix {
    /// Center vectors uniform in [-0.5/dim, +0.5/dim], context vectors
    /// zero.
    pub fn init(labels: Vec<String>, dim: usize, seed: u64) -> Result<Self, Error> {
        if dim < 1 {
            return Err(Error::InvalidConfig("dim must be >= 1".into()));
        }
        let rows = labels.len();
        if rows == 0 {
            return Err(Error::EmptyInput("embedding labels"));
        }
        let label_rows = index_labels(&labels)?;
        let mut rng = Rng::from_seed(seed);
        let mut center = Vec::with_capacity(rows * dim);
        for _ in 0..rows * dim {
            center.push((rng.next_f64() - 0.5) / dim as f64);
        }
        Ok(EmbeddingMatrix {
            dim,
            labels,
            label_rows,
            center,
            context: vec![0.0; rows * dim],
        })
    }

    /// Assembles a matrix from loaded data. A missing context matrix is
    /// replaced with zeros.
    pub fn from_parts(
        labels: Vec<String>,
        dim: usize,
        center: Vec<f64>,
        context: Option<Vec<f64>>,
    ) -> Result<Self, Error> {
        if dim < 1 {
            return Err(Error::InvalidConfig("dim must be >= 1".into()));
        }
        let rows = labels.len();
        if rows == 0 {
            return Err(Error::EmptyInput("embedding labels"));
        }
        if center.len() != rows * dim {
            return Err(Error::DimensionMismatch {
                expected: rows * dim,
                actual: center.len(),
            });
        }
        let context = match context {
            Some(c) => {
                if c.len() != rows * dim {
                    return Err(Error::DimensionMismatch {
                        expected: rows * dim,
                        actual: c.len(),
                    });
                }
                c
            }
            None => vec![0.0; rows * dim],
        };
        let label_rows = index_labels(&labels)?;
        Ok(EmbeddingMatrix {
            dim,
            labels,
            label_rows,
            center,
            context,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, row: u32) -> Option<&str> {
        self.labels.get(row as usize).map(String::as_str)
    }

    pub fn row_of(&self, label: &str) -> Option<u32> {
        self.label_rows.get(label).copied()
    }

    /// Center vector by label; what similarity queries consume.
    pub fn vector(&self, label: &str) -> Option<&[f64]> {
        self.row_of(label).and_then(|r| self.center_row(r))
    }

    pub fn center_row(&self, row: u32) -> Option<&[f64]> {
        let i = row as usize * self.dim;
        self.center.get(i..i + self.dim)
    }

    pub fn context_row(&self, row: u32) -> Option<&[f64]> {
        let i = row as usize * self.dim;
        self.context.get(i..i + self.dim)
    }

    pub fn center_data(&self) -> &[f64] {
        &self.center
    }

    pub fn context_data(&self) -> &[f64] {
        &self.context
    }

    /// Raw storage for the lock-free parallel trainer.
    pub fn into_raw(self) -> (usize, Vec<String>, Vec<f64>, Vec<f64>) {
        (self.dim, self.labels, self.center, self.context)
    }
}

fn index_labels(labels: &[String]) -> Result<HashMap<String, u32>, Error> {
    let mut map = HashMap::with_capacity(labels.len());
    for (i, label) in labels.iter().enumerate() {
        if map.insert(label.clone(), i as u32).is_some() {
            return Err(Error::InvalidConfig(alloc::format!(
                "duplicate embedding label: {label}"
            )));
        }
    }
    Ok(map)
}

/// Counters and the per-epoch mean-loss trace from a training run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainStats {
    pub epoch_mean_loss: Vec<f64>,
    pub pairs_trained: u64,
    pub negatives_skipped: u64,
}

/// Positive training pairs a window of size `window` generates from a
/// walk: for every position, every in-bounds offset in [-window, window]
/// except 0, in ascending offset order.
pub fn window_pairs(walk: &[u32], window: usize) -> Vec<(u32, u32)> {
    let mut pairs = Vec::new();
    for t in 0..walk.len() {
        let lo = t.saturating_sub(window);
        let hi = (t + window).min(walk.len().saturating_sub(1));
        for ctx in lo..=hi {
            if ctx != t {
                pairs.push((walk[t], walk[ctx]));
            }
        }
    }
    pairs
}

/// Number of pairs `window_pairs` yields: sum over positions of
/// min(window, left) + min(window, right).
pub fn window_pair_count(len: usize, window: usize) -> u64 {
    let mut total = 0u64;
    for t in 0..len {
        total += window.min(t) as u64;
        total += window.min(len - 1 - t) as u64;
    }
    total
}

/// One SGD update on (center, context, negatives) at learning rate `lr`.
/// Returns the pre-update loss; the loss is always finite because logits
/// are clamped before exponentiation.
pub fn sgd_step(
    model: &mut EmbeddingMatrix,
    center: u32,
    context: u32,
    negatives: &[u32],
    lr: f64,
) -> Result<f64, Error> {
    let mut acc = Vec::new();
    let mut gradients = Vec::new();
    sgd_step_scratch(model, center, context, negatives, lr, &mut acc, &mut gradients)
}

#[allow(clippy::needless_range_loop)]
fn sgd_step_scratch(
    model: &mut EmbeddingMatrix,
    center: u32,
    context: u32,
    negatives: &[u32],
    lr: f64,
    acc: &mut Vec<f64>,
    gradients: &mut Vec<f64>,
) -> Result<f64, Error> {
    if !(lr > 0.0 && lr.is_finite()) {
        return Err(Error::InvalidConfig("learning rate must be > 0".into()));
    }
    let rows = model.rows() as u32;
    let dim = model.dim;
    for &row in [center, context].iter().chain(negatives) {
        if row >= rows {
            return Err(Error::NodeOutOfRange {
                index: row,
                node_count: rows,
            });
        }
    }
    let cbase = center as usize * dim;

    // Pass 1: logits and loss from pre-update values.
    gradients.clear();
    let mut loss;
    {
        let vc = &model.center[cbase..cbase + dim];
        let obase = context as usize * dim;
        let x_pos = math::dot(&model.context[obase..obase + dim], vc);
        if !x_pos.is_finite() {
            return Err(Error::NonFinite("embedding vectors"));
        }
        loss = -math::ln_sigmoid(x_pos);
        gradients.push(math::sigmoid(x_pos) - 1.0);
        for &j in negatives {
            let jbase = j as usize * dim;
            let x_neg = math::dot(&model.context[jbase..jbase + dim], vc);
            if !x_neg.is_finite() {
                return Err(Error::NonFinite("embedding vectors"));
            }
            loss += -math::ln_sigmoid(-x_neg);
            gradients.push(math::sigmoid(x_neg));
        }
    }

    // Pass 2: update context rows; accumulate the center update from the
    // pre-update context values.
    acc.clear();
    acc.resize(dim, 0.0);
    for (idx, &g) in gradients.iter().enumerate() {
        let row = if idx == 0 { context } else { negatives[idx - 1] };
        let base = row as usize * dim;
        for d in 0..dim {
            acc[d] -= lr * g * model.context[base + d];
        }
        for d in 0..dim {
            model.context[base + d] -= lr * g * model.center[cbase + d];
        }
    }
    for d in 0..dim {
        model.center[cbase + d] += acc[d];
    }
    Ok(loss)
}

/// The loss `sgd_step` would return, without touching the model.
pub fn pair_loss(
    model: &EmbeddingMatrix,
    center: u32,
    context: u32,
    negatives: &[u32],
) -> Result<f64, Error> {
    let rows = model.rows() as u32;
    let dim = model.dim;
    for &row in [center, context].iter().chain(negatives) {
        if row >= rows {
            return Err(Error::NodeOutOfRange {
                index: row,
                node_count: rows,
            });
        }
    }
    let cbase = center as usize * dim;
    let vc = &model.center[cbase..cbase + dim];
    let obase = context as usize * dim;
    let x_pos = math::dot(&model.context[obase..obase + dim], vc);
    if !x_pos.is_finite() {
        return Err(Error::NonFinite("embedding vectors"));
    }
    let mut loss = -math::ln_sigmoid(x_pos);
    for &j in negatives {
        let jbase = j as usize * dim;
        let x_neg = math::dot(&model.context[jbase..jbase + dim], vc);
        if !x_neg.is_finite() {
            return Err(Error::NonFinite("embedding vectors"));
        }
        loss += -math::ln_sigmoid(-x_neg);
    }
    Ok(loss)
}

/// Linear decay over total processed pairs, floored at
/// `LR_FLOOR_FRACTION` of the initial rate. Public so external training
/// drivers reproduce the exact schedule.
#[inline]
pub fn decayed_lr(initial: f64, processed: u64, total: u64) -> f64 {
    let remaining = 1.0 - processed as f64 / total as f64;
    initial * remaining.max(LR_FLOOR_FRACTION)
}

/// Draws a noise row that differs from `exclude`, re-drawing up to
/// `NEGATIVE_REDRAW_CAP` times; `None` means the draw should be skipped
/// and counted.
pub fn draw_negative(noise: &NoiseTable, rng: &mut Rng, exclude: u32) -> Option<u32> {
    for _ in 0..NEGATIVE_REDRAW_CAP {
        let row = noise.sample(rng);
        if row != exclude {
            return Some(row);
        }
    }
    None
}

/// Maps corpus walks onto vocab rows, dropping filtered tokens.
pub fn map_walks(corpus: &WalkCorpus, vocab: &crate::vocab::Vocabulary) -> Vec<Vec<u32>> {
    corpus
        .walks
        .iter()
        .map(|walk| walk.iter().filter_map(|&n| vocab.row(n)).collect())
        .collect()
}

/// Trains embeddings over the corpus. `uris` maps graph node indices to
/// their labels (usually `graph.uris()`). Deterministic in
/// (corpus, uris, config).
#[allow(clippy::needless_range_loop)]
pub fn train(
    corpus: &WalkCorpus,
    uris: &[String],
    config: &TrainConfig,
) -> Result<(EmbeddingMatrix, TrainStats), Error> {
    config.validate()?;
    let vocab = build_vocab(corpus, config.min_count)?;
    let noise = build_noise_table(&vocab, NOISE_POWER);
    let labels = vocab
        .tokens()
        .iter()
        .map(|&node| {
            uris.get(node as usize).cloned().ok_or(Error::NodeOutOfRange {
                index: node,
                node_count: uris.len() as u32,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut model = EmbeddingMatrix::init(
        labels,
        config.dim,
        stream_seed(config.seed, &[STREAM_INIT]),
    )?;

    let walks = map_walks(corpus, &vocab);
    let pairs_per_pass: u64 = walks
        .iter()
        .map(|w| window_pair_count(w.len(), config.window))
        .sum();
    let total_pairs = pairs_per_pass * config.epochs as u64;

    let mut stats = TrainStats::default();
    if total_pairs == 0 {
        return Ok((model, stats));
    }

    let mut acc: Vec<f64> = Vec::with_capacity(config.dim);
    let mut gradients: Vec<f64> = Vec::with_capacity(config.negatives + 1);
    let mut negative_rows: Vec<u32> = Vec::with_capacity(config.negatives);
    let mut processed = 0u64;

    for epoch in 0..config.epochs as u64 {
        let mut epoch_loss = 0.0;
        let mut epoch_pairs = 0u64;
        for (walk_idx, walk) in walks.iter().enumerate() {
            if walk.len() < 2 {
                continue;
            }
            let mut rng = Rng::from_stream(config.seed, &[STREAM_TRAIN, epoch, walk_idx as u64]);
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
                        match draw_negative(&noise, &mut rng, context_row) {
                            Some(row) => negative_rows.push(row),
                            None => stats.negatives_skipped += 1,
                        }
                    }
                    let lr = decayed_lr(config.learning_rate, processed, total_pairs);
                    epoch_loss += sgd_step_scratch(
                        &mut model,
                        center_row,
                        context_row,
                        &negative_rows,
                        lr,
                        &mut acc,
                        &mut gradients,
                    )?;
                    processed += 1;
                    epoch_pairs += 1;
                }
            }
        }
        stats.pairs_trained += epoch_pairs;
        stats
            .epoch_mean_loss
            .push(if epoch_pairs > 0 { epoch_loss / epoch_pairs as f64 } else { 0.0 });
    }
    Ok((model, stats))
}

/// Mean loss over a fixed-seed sample of (center, context, negatives)
/// tuples drawn from the corpus; never mutates the model.
pub fn mean_loss(
    model: &EmbeddingMatrix,
    corpus: &WalkCorpus,
    uris: &[String],
    config: &TrainConfig,
    sample_size: usize,
    seed: u64,
) -> Result<f64, Error> {
    if sample_size == 0 {
        return Err(Error::EmptyInput("loss evaluation sample"));
    }
    let vocab = build_vocab(corpus, config.min_count)?;
    let noise = build_noise_table(&vocab, NOISE_POWER);
    // Vocab rows and model rows may be ordered differently (e.g. a model
    // reloaded from disk); bridge them through the labels.
    let row_map = vocab
        .tokens()
        .iter()
        .map(|&node| {
            let uri = uris
                .get(node as usize)
                .ok_or(Error::NodeOutOfRange {
                    index: node,
                    node_count: uris.len() as u32,
                })?;
            model
                .row_of(uri)
                .ok_or_else(|| Error::UnknownNode(uri.clone()))
        })
        .collect::<Result<Vec<u32>, _>>()?;

    let walks = map_walks(corpus, &vocab);
    let eligible: Vec<&Vec<u32>> = walks.iter().filter(|w| w.len() >= 2).collect();
    if eligible.is_empty() {
        return Err(Error::EmptyInput("no walk long enough to form a pair"));
    }

    let mut rng = Rng::from_stream(seed, &[STREAM_EVAL]);
    let mut negative_rows: Vec<u32> = Vec::with_capacity(config.negatives);
    let mut total = 0.0;
    for _ in 0..sample_size {
        let walk = eligible[rng.next_index(eligible.len())];
        let t = rng.next_index(walk.len());
        let lo = t.saturating_sub(config.window);
        let hi = (t + config.window).min(walk.len() - 1);
        // The window around t, excluding t itself, is nonempty because the
        // walk has at least two tokens.
        let mut ctx = t;
        while ctx == t {
            ctx = lo + rng.next_index(hi - lo + 1);
        }
        let context_row = walk[ctx];
        negative_rows.clear();
        for _ in 0..config.negatives {
            if let Some(row) = draw_negative(&noise, &mut rng, context_row) {
                negative_rows.push(row_map[row as usize]);
            }
        }
        total += pair_loss(
            model,
            row_map[walk[t] as usize],
            row_map[context_row as usize],
            &negative_rows,
        )?;
    }
    Ok(total / sample_size as f64)
}
