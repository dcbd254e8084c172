//! Labeled pair sets, confusion counting, the four reported metrics, and
//! the ranker-vs-baseline comparison report.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use hashbrown::{HashMap, HashSet};

use crate::error::Error;
use crate::logreg::{pair_features, predict_logreg, FeatureMode, LogRegModel};
use crate::rank::predict_topk;
use crate::train::EmbeddingMatrix;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledPair {
    pub source: String,
    pub target: String,
    /// 1 = link exists, 0 = no link.
    pub label: u8,
}

/// Deduplicated labeled (source, target) pairs with class counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledPairSet {
    pairs: Vec<LabeledPair>,
    positives: u64,
    negatives: u64,
    provenance: String,
}

impl LabeledPairSet {
    /// Validates labels, collapses exact duplicates, and rejects a pair
    /// appearing with both labels.
    pub fn from_pairs(pairs: Vec<LabeledPair>, provenance: &str) -> Result<Self, Error> {
        let mut seen: HashMap<(String, String), u8> = HashMap::with_capacity(pairs.len());
        let mut kept = Vec::with_capacity(pairs.len());
        let mut positives = 0u64;
        let mut negatives = 0u64;
        for pair in pairs {
            if pair.label > 1 {
                return Err(Error::InvalidConfig(format!(
                    "label must be 0 or 1 for pair ({}, {})",
                    pair.source, pair.target
                )));
            }
            let key = (pair.source.clone(), pair.target.clone());
            match seen.get(&key) {
                Some(&existing) if existing == pair.label => continue,
                Some(_) => {
                    return Err(Error::ConflictingLabel {
                        source: pair.source,
                        target: pair.target,
                    })
                }
                None => {
                    seen.insert(key, pair.label);
                    if pair.label == 1 {
                        positives += 1;
                    } else {
                        negatives += 1;
                    }
                    kept.push(pair);
                }
            }
        }
        Ok(LabeledPairSet {
            pairs: kept,
            positives,
            negatives,
            provenance: provenance.to_string(),
        })
    }

    pub fn pairs(&self) -> &[LabeledPair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn positives(&self) -> u64 {
        self.positives
    }

    pub fn negatives(&self) -> u64 {
        self.negatives
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }
}

/// Parses `source,target,label` CSV (header required). Exact duplicate rows
/// collapse; conflicting labels for one pair are an error.
pub fn load_labeled_pairs<'a, I>(lines: I, provenance: &str) -> Result<LabeledPairSet, Error>
where
    I: IntoIterator<Item = &'a str>,
{
    let mut iter = lines.into_iter();
    let header = iter.next().ok_or(Error::EmptyInput("labeled pair file"))?;
    if header.trim() != "source,target,label" {
        return Err(Error::Parse {
            line: 1,
            message: "expected header `source,target,label`".to_string(),
        });
    }
    let mut pairs = Vec::new();
    for (line_no, line) in (2u64..).zip(iter) {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').collect();
        if fields.len() != 3 {
            return Err(Error::Parse {
                line: line_no,
                message: "expected 3 comma-separated fields".to_string(),
            });
        }
        let label = match fields[2].trim() {
            "0" => 0,
            "1" => 1,
            other => {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("label must be 0 or 1, got `{other}`"),
                })
            }
        };
        pairs.push(LabeledPair {
            source: fields[0].trim().to_string(),
            target: fields[1].trim().to_string(),
            label,
        });
    }
    if pairs.is_empty() {
        return Err(Error::EmptyInput("labeled pair file"));
    }
    LabeledPairSet::from_pairs(pairs, provenance)
}

/// 2x2 confusion counts plus the pairs excluded for missing embeddings.
/// classified() + skipped always equals the input pair count.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ConfusionCounts {
    pub true_positives: u64,
    pub false_positives: u64,
    pub true_negatives: u64,
    pub false_negatives: u64,
    pub skipped: u64,
}

impl ConfusionCounts {
    pub fn classified(&self) -> u64 {
        self.true_positives + self.false_positives + self.true_negatives + self.false_negatives
    }
}

/// Tallies predictions against labels, aligned by (source, target).
/// Every prediction must have a label and every label must be predicted or
/// skipped.
pub fn confusion<'a, I>(
    predictions: I,
    skipped: u64,
    labels: &LabeledPairSet,
) -> Result<ConfusionCounts, Error>
where
    I: IntoIterator<Item = (&'a str, &'a str, bool)>,
{
    let mut label_map: HashMap<(&str, &str), u8> = HashMap::with_capacity(labels.len());
    for pair in labels.pairs() {
        label_map.insert((pair.source.as_str(), pair.target.as_str()), pair.label);
    }
    let mut counts = ConfusionCounts {
        skipped,
        ..ConfusionCounts::default()
    };
    let mut matched: HashSet<(&str, &str)> = HashSet::new();
    for (source, target, predicted) in predictions {
        let label = *label_map
            .get(&(source, target))
            .ok_or_else(|| Error::KeyMismatch {
                source: source.to_string(),
                target: target.to_string(),
            })?;
        if !matched.insert((source, target)) {
            return Err(Error::KeyMismatch {
                source: source.to_string(),
                target: target.to_string(),
            });
        }
        match (predicted, label != 0) {
            (true, true) => counts.true_positives += 1,
            (true, false) => counts.false_positives += 1,
            (false, false) => counts.true_negatives += 1,
            (false, true) => counts.false_negatives += 1,
        }
    }
    if counts.classified() + counts.skipped != labels.len() as u64 {
        // Name one labeled pair that never showed up.
        for pair in labels.pairs() {
            if !matched.contains(&(pair.source.as_str(), pair.target.as_str())) {
                return Err(Error::KeyMismatch {
                    source: pair.source.clone(),
                    target: pair.target.clone(),
                });
            }
        }
        return Err(Error::KeyMismatch {
            source: String::new(),
            target: String::new(),
        });
    }
    Ok(counts)
}

/// Accuracy, precision, recall, F1 in [0, 1]. Degenerate precision/recall
/// (empty denominator) report 0 with a flag so downstream tables never
/// fail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub precision_degenerate: bool,
    pub recall_degenerate: bool,
}

pub fn metrics(c: &ConfusionCounts) -> Result<Metrics, Error> {
    let classified = c.classified();
    if classified == 0 {
        return Err(Error::EmptyInput("confusion counts"));
    }
    let accuracy = (c.true_positives + c.true_negatives) as f64 / classified as f64;
    let predicted_positive = c.true_positives + c.false_positives;
    let actual_positive = c.true_positives + c.false_negatives;
    let (precision, precision_degenerate) = if predicted_positive == 0 {
        (0.0, true)
    } else {
        (c.true_positives as f64 / predicted_positive as f64, false)
    };
    let (recall, recall_degenerate) = if actual_positive == 0 {
        (0.0, true)
    } else {
        (c.true_positives as f64 / actual_positive as f64, false)
    };
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    Ok(Metrics {
        accuracy,
        precision,
        recall,
        f1,
        precision_degenerate,
        recall_degenerate,
    })
}

/// One row of the comparison report.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub strategy: String,
    /// "logreg" or "topK".
    pub method: String,
    pub k: Option<usize>,
    pub metrics: Metrics,
    pub counts: ConfusionCounts,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ComparisonReport {
    pub rows: Vec<ReportRow>,
}

impl ComparisonReport {
    /// CSV with 4-decimal metrics, matching the table precision used in
    /// reports.
    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("strategy,method,k,accuracy,f1,precision,recall,tp,fp,tn,fn,skipped\n");
        for row in &self.rows {
            let k = row.k.map(|k| k.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{:.4},{:.4},{:.4},{:.4},{},{},{},{},{}\n",
                row.strategy,
                row.method,
                k,
                row.metrics.accuracy,
                row.metrics.f1,
                row.metrics.precision,
                row.metrics.recall,
                row.counts.true_positives,
                row.counts.false_positives,
                row.counts.true_negatives,
                row.counts.false_negatives,
                row.counts.skipped,
            ));
        }
        out
    }

    /// Aligned plain-text table: Accuracy, F1, Precision, Recall.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{:<12} {:<10} {:>8} {:>8} {:>9} {:>8} {:>8}\n",
            "Strategy", "Method", "Accuracy", "F1", "Precision", "Recall", "Skipped"
        );
        for row in &self.rows {
            let method = match row.k {
                Some(k) => format!("top-{k}"),
                None => row.method.clone(),
            };
            out.push_str(&format!(
                "{:<12} {:<10} {:>8.4} {:>8.4} {:>9.4} {:>8.4} {:>8}\n",
                row.strategy,
                method,
                row.metrics.accuracy,
                row.metrics.f1,
                row.metrics.precision,
                row.metrics.recall,
                row.counts.skipped,
            ));
        }
        out
    }
}

/// Evaluates the logistic baseline and the top-K ranker on the same pairs:
/// one row for the baseline, one per K. An empty K list produces a
/// baseline-only report.
pub fn compare_report(
    model: &EmbeddingMatrix,
    pairs: &LabeledPairSet,
    k_values: &[usize],
    baseline: &LogRegModel,
    feature_mode: FeatureMode,
    strategy_label: &str,
) -> Result<ComparisonReport, Error> {
    if pairs.is_empty() {
        return Err(Error::EmptyInput("labeled pair set"));
    }
    let mut rows = Vec::with_capacity(1 + k_values.len());

    // Baseline: per-pair features, sigma(w.x + b) >= 0.5.
    let mut decisions: Vec<(&str, &str, bool)> = Vec::with_capacity(pairs.len());
    let mut skipped = 0u64;
    for pair in pairs.pairs() {
        match pair_features(model, &pair.source, &pair.target, feature_mode) {
            Ok(features) => {
                let (_, predicted) = predict_logreg(baseline, &features)?;
                decisions.push((pair.source.as_str(), pair.target.as_str(), predicted));
            }
            Err(Error::UnknownNode(_)) => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    if decisions.is_empty() {
        return Err(Error::NoEvaluablePairs);
    }
    let counts = confusion(decisions, skipped, pairs)?;
    rows.push(ReportRow {
        strategy: strategy_label.to_string(),
        method: "logreg".to_string(),
        k: None,
        metrics: metrics(&counts)?,
        counts,
    });

    for &k in k_values {
        let preds = predict_topk(model, pairs, k)?;
        let counts = confusion(preds.decisions(), preds.skipped.len() as u64, pairs)?;
        rows.push(ReportRow {
            strategy: strategy_label.to_string(),
            method: "topK".to_string(),
            k: Some(k),
            metrics: metrics(&counts)?,
            counts,
        });
    }
    Ok(ComparisonReport { rows })
}
