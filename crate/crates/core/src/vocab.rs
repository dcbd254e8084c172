//! Corpus vocabulary and the negative-sampling noise distribution.

use alloc::vec::Vec;

use hashbrown::HashMap;

use crate::error::Error;
use crate::graph::NodeId;
use crate::math;
use crate::rng::Rng;
use crate::walk::WalkCorpus;

/// Nodes retained from a corpus, ordered by descending frequency (ties by
/// ascending node index) into dense rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    tokens: Vec<NodeId>,
    rows: HashMap<NodeId, u32>,
    counts: Vec<u64>,
    total_tokens: u64,
    retained_tokens: u64,
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Graph node behind a vocab row.
    pub fn token(&self, row: u32) -> Option<NodeId> {
        self.tokens.get(row as usize).copied()
    }

    pub fn tokens(&self) -> &[NodeId] {
        &self.tokens
    }

    /// Vocab row of a graph node, if retained.
    pub fn row(&self, node: NodeId) -> Option<u32> {
        self.rows.get(&node).copied()
    }

    pub fn count(&self, row: u32) -> Option<u64> {
        self.counts.get(row as usize).copied()
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Size of the training corpus in tokens, before min_count filtering.
    pub fn total_tokens(&self) -> u64 {
        self.total_tokens
    }

    /// Sum of retained counts; <= total_tokens.
    pub fn retained_tokens(&self) -> u64 {
        self.retained_tokens
    }
}

/// Counts node occurrences across the corpus and drops nodes seen fewer
/// than `min_count` times.
pub fn build_vocab(corpus: &WalkCorpus, min_count: u64) -> Result<Vocabulary, Error> {
    if corpus.walks.is_empty() {
        return Err(Error::EmptyInput("walk corpus"));
    }
    let mut occurrence: HashMap<NodeId, u64> = HashMap::new();
    let mut total_tokens = 0u64;
    for walk in &corpus.walks {
        total_tokens += walk.len() as u64;
        for &node in walk {
            *occurrence.entry(node).or_insert(0) += 1;
        }
    }
    let mut entries: Vec<(NodeId, u64)> = occurrence
        .into_iter()
        .filter(|&(_, c)| c >= min_count)
        .collect();
    if entries.is_empty() {
        return Err(Error::EmptyInput("vocabulary: min_count dropped every node"));
    }
    entries.sort_unstable_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));

    let mut tokens = Vec::with_capacity(entries.len());
    let mut counts = Vec::with_capacity(entries.len());
    let mut rows = HashMap::with_capacity(entries.len());
    let mut retained_tokens = 0u64;
    for (row, (node, count)) in entries.into_iter().enumerate() {
        tokens.push(node);
        counts.push(count);
        rows.insert(node, row as u32);
        retained_tokens += count;
    }
    Ok(Vocabulary {
        tokens,
        rows,
        counts,
        total_tokens,
        retained_tokens,
    })
}

/// Cumulative table for the noise distribution P(w) proportional to
/// count(w)^power. Sampling is one uniform draw plus a binary search.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseTable {
    cumulative: Vec<f64>,
}

pub const NOISE_POWER: f64 = 0.75;

pub fn build_noise_table(vocab: &Vocabulary, power: f64) -> NoiseTable {
    let weights: Vec<f64> = vocab
        .counts()
        .iter()
        .map(|&c| math::powf(c as f64, power))
        .collect();
    let total: f64 = weights.iter().sum();
    let mut cumulative = Vec::with_capacity(weights.len());
    let mut acc = 0.0;
    for w in weights {
        acc += w / total;
        cumulative.push(acc);
    }
    // Pin the final entry so rounding can never leave a draw past the end.
    if let Some(last) = cumulative.last_mut() {
        *last = 1.0;
    }
    NoiseTable { cumulative }
}

impl NoiseTable {
    /// Draws a vocab row with probability P(w).
    #[inline]
    pub fn sample(&self, rng: &mut Rng) -> u32 {
        let u = rng.next_f64();
        self.cumulative.partition_point(|&c| c <= u) as u32
    }

    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    /// P(row), recovered from the cumulative table.
    pub fn probability(&self, row: u32) -> f64 {
        let i = row as usize;
        let hi = self.cumulative[i];
        let lo = if i == 0 { 0.0 } else { self.cumulative[i - 1] };
        hi - lo
    }

    pub fn len(&self) -> usize {
        self.cumulative.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cumulative.is_empty()
    }
}
