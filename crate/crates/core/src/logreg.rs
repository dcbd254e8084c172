//! Logistic-regression link-prediction baseline over embedding-derived
//! pair features.
//!
//! Fitting is full-batch gradient descent on the L2-regularized mean
//! logistic loss, with step-halving so the loss never increases. At the
//! scales this baseline sees (tens of thousands of pairs) full-batch is
//! fast and, unlike SGD, deterministic without any seed plumbing.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use hashbrown::HashSet;

use crate::error::Error;
use crate::eval::{LabeledPair, LabeledPairSet};
use crate::graph::{EdgeTypeId, HeteroGraph, NodeId};
use crate::math;
use crate::rng::Rng;
use crate::train::EmbeddingMatrix;

/// Substream tag for training-link sampling.
pub const STREAM_SAMPLE: u64 = 6;

/// Rejections allowed per requested negative before sampling gives up.
pub const REJECTION_BUDGET_FACTOR: u64 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureMode {
    /// Element-wise product; dimension d.
    Hadamard,
    /// Concatenation; dimension 2d.
    Concat,
}

impl FeatureMode {
    pub fn name(&self) -> &'static str {
        match self {
            FeatureMode::Hadamard => "hadamard",
            FeatureMode::Concat => "concat",
        }
    }

    pub fn parse(name: &str) -> Result<Self, Error> {
        match name {
            "hadamard" => Ok(FeatureMode::Hadamard),
            "concat" => Ok(FeatureMode::Concat),
            other => Err(Error::InvalidConfig(alloc::format!(
                "unknown feature mode: {other}"
            ))),
        }
    }
}

impl core::fmt::Display for FeatureMode {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

/// Pair feature vector from the two nodes' center embeddings.
pub fn pair_features(
    model: &EmbeddingMatrix,
    source: &str,
    target: &str,
    mode: FeatureMode,
) -> Result<Vec<f64>, Error> {
    let s = model
        .vector(source)
        .ok_or_else(|| Error::UnknownNode(source.to_string()))?;
    let t = model
        .vector(target)
        .ok_or_else(|| Error::UnknownNode(target.to_string()))?;
    Ok(match mode {
        FeatureMode::Hadamard => s.iter().zip(t).map(|(a, b)| a * b).collect(),
        FeatureMode::Concat => s.iter().chain(t).copied().collect(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogRegModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub iterations: usize,
    pub final_loss: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct FitConfig {
    pub l2: f64,
    pub learning_rate: f64,
    pub max_epochs: usize,
    pub tolerance: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            l2: 1e-4,
            learning_rate: 0.1,
            max_epochs: 200,
            tolerance: 1e-6,
        }
    }
}

/// Mean logistic loss plus (l2/2)|w|^2. The bias is not penalized.
pub fn logreg_loss(weights: &[f64], bias: f64, features: &[Vec<f64>], labels: &[u8], l2: f64) -> f64 {
    let mut total = 0.0;
    for (x, &y) in features.iter().zip(labels) {
        let z = math::dot(weights, x) + bias;
        // ln(1 + e^z) - y z, the stable form of the cross-entropy.
        total += math::softplus(z) - y as f64 * z;
    }
    let penalty: f64 = weights.iter().map(|w| w * w).sum::<f64>() * l2 / 2.0;
    total / features.len() as f64 + penalty
}

/// Gradient of `logreg_loss` with respect to (weights, bias).
pub fn logreg_gradient(
    weights: &[f64],
    bias: f64,
    features: &[Vec<f64>],
    labels: &[u8],
    l2: f64,
) -> (Vec<f64>, f64) {
    let n = features.len() as f64;
    let mut grad_w = vec![0.0; weights.len()];
    let mut grad_b = 0.0;
    for (x, &y) in features.iter().zip(labels) {
        let z = math::dot(weights, x) + bias;
        let residual = math::sigmoid(z) - y as f64;
        for (g, &xi) in grad_w.iter_mut().zip(x) {
            *g += residual * xi;
        }
        grad_b += residual;
    }
    for (g, &w) in grad_w.iter_mut().zip(weights) {
        *g = *g / n + l2 * w;
    }
    (grad_w, grad_b / n)
}

/// Full-batch gradient descent from zero weights. Returns the model and
/// the accepted-loss trace (starting at the initial loss, ln 2).
pub fn fit_logreg(
    features: &[Vec<f64>],
    labels: &[u8],
    config: &FitConfig,
) -> Result<(LogRegModel, Vec<f64>), Error> {
    if features.is_empty() {
        return Err(Error::EmptyInput("training features"));
    }
    if features.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: features.len(),
            actual: labels.len(),
        });
    }
    let dim = features[0].len();
    if dim == 0 {
        return Err(Error::EmptyInput("feature vector"));
    }
    for x in features {
        if x.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: x.len(),
            });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("training features"));
        }
    }
    if labels.iter().any(|&y| y > 1) {
        return Err(Error::InvalidConfig("labels must be 0 or 1".into()));
    }
    if labels.iter().all(|&y| y == 1) || labels.iter().all(|&y| y == 0) {
        return Err(Error::SingleClass);
    }
    let lr_ok = config.learning_rate > 0.0 && config.learning_rate.is_finite();
    if !lr_ok || config.l2 < 0.0 || config.tolerance < 0.0 {
        return Err(Error::InvalidConfig("invalid fit configuration".into()));
    }

    let mut weights = vec![0.0; dim];
    let mut bias = 0.0;
    let mut loss = logreg_loss(&weights, bias, features, labels, config.l2);
    let mut trace = vec![loss];
    let mut lr = config.learning_rate;
    let mut iterations = 0;

    for _ in 0..config.max_epochs {
        let (grad_w, grad_b) = logreg_gradient(&weights, bias, features, labels, config.l2);
        // Step-halving keeps the trace monotone non-increasing.
        let mut accepted = None;
        for _ in 0..60 {
            let candidate_w: Vec<f64> =
                weights.iter().zip(&grad_w).map(|(w, g)| w - lr * g).collect();
            let candidate_b = bias - lr * grad_b;
            let candidate_loss =
                logreg_loss(&candidate_w, candidate_b, features, labels, config.l2);
            if candidate_loss <= loss {
                accepted = Some((candidate_w, candidate_b, candidate_loss));
                break;
            }
            lr /= 2.0;
        }
        let Some((new_w, new_b, new_loss)) = accepted else {
            break;
        };
        let improvement = loss - new_loss;
        weights = new_w;
        bias = new_b;
        loss = new_loss;
        trace.push(loss);
        iterations += 1;
        if improvement < config.tolerance {
            break;
        }
    }

    Ok((
        LogRegModel {
            weights,
            bias,
            iterations,
            final_loss: loss,
        },
        trace,
    ))
}

/// sigma(w.x + b) and the hard label at the 0.5 boundary (>= is positive).
pub fn predict_logreg(model: &LogRegModel, features: &[f64]) -> Result<(f64, bool), Error> {
    if features.len() != model.weights.len() {
        return Err(Error::DimensionMismatch {
            expected: model.weights.len(),
            actual: features.len(),
        });
    }
    let z = math::dot(&model.weights, features) + model.bias;
    let probability = math::sigmoid(z);
    Ok((probability, probability >= 0.5))
}

/// Samples labeled training links from the graph: positives uniformly
/// without replacement from edges matching `relation` (all edges when
/// `None`), negatives from type-compatible non-edges verified via
/// `has_edge`, disjoint from the positives.
pub fn sample_training_links(
    graph: &HeteroGraph,
    relation: Option<EdgeTypeId>,
    n_pos: usize,
    n_neg: usize,
    seed: u64,
) -> Result<LabeledPairSet, Error> {
    let mut matching: Vec<(NodeId, NodeId, EdgeTypeId)> = graph
        .edge_list()
        .iter()
        .copied()
        .filter(|&(_, _, t)| relation.is_none_or(|r| r == t))
        .collect();
    if matching.len() < n_pos {
        return Err(Error::InsufficientEdges {
            available: matching.len(),
            requested: n_pos,
        });
    }
    if n_neg > 0 && matching.is_empty() {
        return Err(Error::InsufficientEdges {
            available: 0,
            requested: 1,
        });
    }

    let mut rng = Rng::from_stream(seed, &[STREAM_SAMPLE]);
    // Partial Fisher-Yates for the positives.
    for i in 0..n_pos {
        let j = i + rng.next_index(matching.len() - i);
        matching.swap(i, j);
    }

    let uri = |node: NodeId| graph.uri(node).unwrap_or_default().to_string();
    let mut pairs: Vec<LabeledPair> = Vec::with_capacity(n_pos + n_neg);
    let mut taken: HashSet<(NodeId, NodeId)> = HashSet::with_capacity(n_pos + n_neg);
    for &(s, d, _) in &matching[..n_pos] {
        taken.insert((s.min(d), s.max(d)));
        pairs.push(LabeledPair {
            source: uri(s),
            target: uri(d),
            label: 1,
        });
    }

    if n_neg > 0 {
        // Template edges define the admissible (source type, target type)
        // combinations, mirroring the pairing structure of the positives.
        let budget = REJECTION_BUDGET_FACTOR * n_neg as u64;
        let mut rejections = 0u64;
        let mut by_type: hashbrown::HashMap<u32, Vec<NodeId>> = hashbrown::HashMap::new();
        let mut nodes_of = |ty: u32| -> Vec<NodeId> {
            by_type
                .entry(ty)
                .or_insert_with(|| {
                    graph
                        .nodes_by_type(ty)
                        .expect("template edge endpoint type is registered")
                })
                .clone()
        };
        let mut found = 0usize;
        while found < n_neg {
            let &(ts, td, _) = &matching[rng.next_index(matching.len())];
            let source_type = graph.node_type(ts).unwrap_or_default();
            let target_type = graph.node_type(td).unwrap_or_default();
            let source_pool = nodes_of(source_type);
            let target_pool = nodes_of(target_type);
            let u = source_pool[rng.next_index(source_pool.len())];
            let v = target_pool[rng.next_index(target_pool.len())];
            let key = (u.min(v), u.max(v));
            if u == v || taken.contains(&key) || graph.has_edge(u, v)? {
                rejections += 1;
                if rejections > budget {
                    return Err(Error::GraphTooDense);
                }
                continue;
            }
            taken.insert(key);
            pairs.push(LabeledPair {
                source: uri(u),
                target: uri(v),
                label: 0,
            });
            found += 1;
        }
    }

    LabeledPairSet::from_pairs(pairs, "sampled from graph")
}
