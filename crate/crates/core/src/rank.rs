//! Cosine similarity scoring and top-K candidate ranking — the
//! knowledge-graph completion mechanism.
//!
//! A source node's candidate targets are ordered by cosine similarity of
//! their center vectors; a pair is predicted as a link iff its rank is at
//! most K. Ties always break by ascending target URI so rankings are
//! reproducible.

use alloc::collections::{BTreeMap, BTreeSet, BinaryHeap};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::Error;
use crate::eval::LabeledPairSet;
use crate::math;
use crate::train::EmbeddingMatrix;

/// Exact sort is used instead of the bounded heap whenever the candidate
/// count is at most this multiple of K.
const FULL_SORT_FACTOR: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct RankedEntry {
    pub target: String,
    pub score: f64,
    /// 1-based, consecutive.
    pub rank: usize,
}

/// Top-K ranking of one source's candidates, scores non-increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedList {
    pub source: String,
    pub entries: Vec<RankedEntry>,
    /// Candidates skipped because they have no embedding.
    pub skipped_candidates: u64,
}

/// cos(a, b) = a.b / (|a| |b|), clamped into [-1, 1] against rounding.
pub fn cosine(a: &[f64], b: &[f64]) -> Result<f64, Error> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    if a.is_empty() {
        return Err(Error::EmptyInput("vector"));
    }
    let mut dot = 0.0;
    let mut norm_a = 0.0;
    let mut norm_b = 0.0;
    for i in 0..a.len() {
        dot += a[i] * b[i];
        norm_a += a[i] * a[i];
        norm_b += b[i] * b[i];
    }
    if !dot.is_finite() || !norm_a.is_finite() || !norm_b.is_finite() {
        return Err(Error::NonFinite("similarity input"));
    }
    if norm_a == 0.0 || norm_b == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok((dot / (math::sqrt(norm_a) * math::sqrt(norm_b))).clamp(-1.0, 1.0))
}

/// Ranking order: higher score first, ties by ascending target string.
#[inline]
fn better(score_a: f64, target_a: &str, score_b: f64, target_b: &str) -> Ordering {
    score_b
        .total_cmp(&score_a)
        .then_with(|| target_a.cmp(target_b))
}

/// Heap entry ordered so the max-heap peek is the current worst candidate.
struct HeapEntry {
    score: f64,
    target: String,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for HeapEntry {}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Worse entries compare greater, so the max-heap peek is the
        // current worst candidate.
        better(self.score, &self.target, other.score, &other.target)
    }
}

/// Ranks `candidates` against `source` and returns the K best (all of them
/// when fewer than K score). Candidates are deduplicated; candidates
/// missing from the vocabulary are skipped and counted.
pub fn rank_targets(
    model: &EmbeddingMatrix,
    source: &str,
    candidates: &[String],
    k: usize,
) -> Result<RankedList, Error> {
    if k == 0 {
        return Err(Error::InvalidConfig("K must be >= 1".into()));
    }
    let source_vec = model
        .vector(source)
        .ok_or_else(|| Error::UnknownNode(source.to_string()))?;

    let unique: BTreeSet<&str> = candidates.iter().map(String::as_str).collect();
    if unique.is_empty() {
        return Err(Error::EmptyInput("candidate set"));
    }

    let mut skipped = 0u64;
    let use_full_sort = unique.len() <= FULL_SORT_FACTOR.saturating_mul(k);

    let entries = if use_full_sort {
        let mut scored: Vec<(f64, &str)> = Vec::with_capacity(unique.len());
        for target in &unique {
            match model.vector(target) {
                Some(v) => scored.push((cosine(source_vec, v)?, target)),
                None => skipped += 1,
            }
        }
        scored.sort_by(|x, y| better(x.0, x.1, y.0, y.1));
        scored.truncate(k);
        scored
            .into_iter()
            .map(|(score, target)| (score, target.to_string()))
            .collect::<Vec<_>>()
    } else {
        // Bounded selection: O(n log K) with a worst-first heap.
        let mut heap: BinaryHeap<HeapEntry> = BinaryHeap::with_capacity(k + 1);
        for target in &unique {
            let v = match model.vector(target) {
                Some(v) => v,
                None => {
                    skipped += 1;
                    continue;
                }
            };
            let score = cosine(source_vec, v)?;
            if heap.len() < k {
                heap.push(HeapEntry {
                    score,
                    target: target.to_string(),
                });
            } else if let Some(worst) = heap.peek() {
                if better(score, target, worst.score, &worst.target) == Ordering::Less {
                    heap.pop();
                    heap.push(HeapEntry {
                        score,
                        target: target.to_string(),
                    });
                }
            }
        }
        let mut selected: Vec<(f64, String)> =
            heap.into_iter().map(|e| (e.score, e.target)).collect();
        selected.sort_by(|x, y| better(x.0, &x.1, y.0, &y.1));
        selected
    };

    Ok(RankedList {
        source: source.to_string(),
        entries: entries
            .into_iter()
            .enumerate()
            .map(|(i, (score, target))| RankedEntry {
                target,
                score,
                rank: i + 1,
            })
            .collect(),
        skipped_candidates: skipped,
    })
}

/// One prediction row: rank within the source's candidate group and the
/// top-K decision.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionRow {
    pub source: String,
    pub target: String,
    pub score: f64,
    pub rank: usize,
    pub predicted: bool,
    pub label: u8,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TopKPredictions {
    pub rows: Vec<PredictionRow>,
    /// Pairs excluded because source or target has no embedding.
    pub skipped: Vec<(String, String)>,
}

impl TopKPredictions {
    /// (source, target, predicted) view for confusion counting.
    pub fn decisions(&self) -> impl Iterator<Item = (&str, &str, bool)> {
        self.rows
            .iter()
            .map(|r| (r.source.as_str(), r.target.as_str(), r.predicted))
    }
}

/// Groups labeled pairs by source, ranks each source's labeled targets by
/// cosine, and predicts positive iff rank <= K.
pub fn predict_topk(
    model: &EmbeddingMatrix,
    pairs: &LabeledPairSet,
    k: usize,
) -> Result<TopKPredictions, Error> {
    if pairs.pairs().is_empty() {
        return Err(Error::EmptyInput("labeled pair set"));
    }
    if k == 0 {
        return Err(Error::InvalidConfig("K must be >= 1".into()));
    }

    let mut groups: BTreeMap<&str, Vec<(&str, u8)>> = BTreeMap::new();
    for pair in pairs.pairs() {
        groups
            .entry(pair.source.as_str())
            .or_default()
            .push((pair.target.as_str(), pair.label));
    }

    let mut out = TopKPredictions::default();
    for (source, group) in groups {
        if model.row_of(source).is_none() {
            for (target, _) in group {
                out.skipped.push((source.to_string(), target.to_string()));
            }
            continue;
        }
        let mut labels: BTreeMap<&str, u8> = BTreeMap::new();
        let mut candidates: Vec<String> = Vec::with_capacity(group.len());
        for (target, label) in &group {
            labels.insert(target, *label);
            if model.row_of(target).is_some() {
                candidates.push(target.to_string());
            } else {
                out.skipped.push((source.to_string(), target.to_string()));
            }
        }
        if candidates.is_empty() {
            continue;
        }
        // Full ranking of the group; the K cut is applied per rank.
        let ranked = rank_targets(model, source, &candidates, candidates.len())?;
        for entry in ranked.entries {
            let label = labels[entry.target.as_str()];
            out.rows.push(PredictionRow {
                source: source.to_string(),
                target: entry.target,
                score: entry.score,
                rank: entry.rank,
                predicted: entry.rank <= k,
                label,
            });
        }
    }
    if out.rows.is_empty() {
        return Err(Error::NoEvaluablePairs);
    }
    Ok(out)
}
