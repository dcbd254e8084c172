//! edge2vec transition matrix: edge-type x edge-type walk biases.
//!
//! The matrix is trained by an EM loop: sample a corpus of walks whose
//! steps are weighted by the current matrix (E-step), count edge-type
//! co-occurrences within a small window over each walk's edge-type
//! sequence, then renormalize rows with Laplace smoothing (M-step).

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::graph::{EdgeTypeId, HeteroGraph, NodeId};
use crate::rng::Rng;
use crate::walk::{pick_weighted, WalkConfig};

/// Substream tag for EM sampling walks.
pub(crate) const STREAM_EM: u64 = 2;

/// Row-stochastic square matrix over edge types.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    dim: usize,
    rows: Vec<f64>,
}

impl TransitionMatrix {
    /// Every entry 1/dim.
    pub fn uniform(dim: usize) -> Result<Self, Error> {
        if dim == 0 {
            return Err(Error::ZeroEdgeTypes);
        }
        Ok(TransitionMatrix {
            dim,
            rows: vec![1.0 / dim as f64; dim * dim],
        })
    }

    /// M-step: `M[i][j] = (C[i][j] + 1) / sum_k (C[i][k] + 1)`.
    pub fn from_counts(counts: &[u64], dim: usize) -> Result<Self, Error> {
        if dim == 0 {
            return Err(Error::ZeroEdgeTypes);
        }
        if counts.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                actual: counts.len(),
            });
        }
        let mut rows = vec![0.0; dim * dim];
        for i in 0..dim {
            let row = &counts[i * dim..(i + 1) * dim];
            let total: u64 = row.iter().map(|&c| c + 1).sum();
            for j in 0..dim {
                rows[i * dim + j] = (row[j] + 1) as f64 / total as f64;
            }
        }
        Ok(TransitionMatrix { dim, rows })
    }

    /// Builds from explicit rows; each row must be non-negative and sum to
    /// 1 within 1e-9.
    pub fn from_rows(rows: Vec<f64>, dim: usize) -> Result<Self, Error> {
        if dim == 0 {
            return Err(Error::ZeroEdgeTypes);
        }
        if rows.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                actual: rows.len(),
            });
        }
        for i in 0..dim {
            let row = &rows[i * dim..(i + 1) * dim];
            if row.iter().any(|&w| w.is_nan() || w < 0.0 || !w.is_finite()) {
                return Err(Error::NonFinite("transition matrix row"));
            }
            let sum: f64 = row.iter().sum();
            if crate::math::abs(sum - 1.0) > 1e-9 {
                return Err(Error::InvalidConfig(
                    "transition matrix rows must sum to 1".to_string(),
                ));
            }
        }
        Ok(TransitionMatrix { dim, rows })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, from: EdgeTypeId, to: EdgeTypeId) -> f64 {
        self.rows[from as usize * self.dim + to as usize]
    }

    pub fn row(&self, from: EdgeTypeId) -> &[f64] {
        &self.rows[from as usize * self.dim..(from as usize + 1) * self.dim]
    }

    /// Largest |row sum - 1| across rows; tests pin this below 1e-12.
    pub fn max_row_sum_error(&self) -> f64 {
        (0..self.dim)
            .map(|i| {
                let sum: f64 = self.rows[i * self.dim..(i + 1) * self.dim].iter().sum();
                crate::math::abs(sum - 1.0)
            })
            .fold(0.0, f64::max)
    }
}

/// One edge2vec step: samples a neighbor (v, t) of `curr` with probability
/// proportional to `M[prev][t]`; uniform when `prev` is `None` (the walk's
/// first step). Returns the chosen neighbor, its edge type, and whether the
/// step fell back to uniform because every candidate weight was zero.
pub fn edge2vec_step(
    graph: &HeteroGraph,
    prev_edge_type: Option<EdgeTypeId>,
    curr: NodeId,
    matrix: &TransitionMatrix,
    rng: &mut Rng,
) -> Result<Option<(NodeId, EdgeTypeId, bool)>, Error> {
    let mut scratch = Vec::new();
    edge2vec_step_scratch(graph, prev_edge_type, curr, matrix, rng, &mut scratch)
}

pub(crate) fn edge2vec_step_scratch(
    graph: &HeteroGraph,
    prev_edge_type: Option<EdgeTypeId>,
    curr: NodeId,
    matrix: &TransitionMatrix,
    rng: &mut Rng,
    weights: &mut Vec<f64>,
) -> Result<Option<(NodeId, EdgeTypeId, bool)>, Error> {
    if matrix.dim() != graph.registry().edge_type_count() {
        return Err(Error::DimensionMismatch {
            expected: graph.registry().edge_type_count(),
            actual: matrix.dim(),
        });
    }
    if let Some(prev) = prev_edge_type {
        if prev as usize >= matrix.dim() {
            return Err(Error::UnknownEdgeType(prev));
        }
    }
    let neighbors = graph.neighbors(curr)?;
    if neighbors.is_empty() {
        return Ok(None);
    }
    weights.clear();
    let mut fell_back = false;
    match prev_edge_type {
        None => weights.resize(neighbors.len(), 1.0),
        Some(prev) => {
            weights.extend(neighbors.iter().map(|&(_, t)| matrix.get(prev, t)));
            if weights.iter().all(|&w| w == 0.0) {
                fell_back = true;
                weights.clear();
                weights.resize(neighbors.len(), 1.0);
            }
        }
    }
    let pick = pick_weighted(rng, weights);
    let (node, edge_type) = neighbors[pick];
    Ok(Some((node, edge_type, fell_back)))
}

/// Trains the transition matrix: uniform initialization, then
/// `em_iterations` rounds of matrix-weighted walk sampling and
/// Laplace-smoothed co-occurrence renormalization.
pub fn em_train_transition(
    graph: &HeteroGraph,
    config: &WalkConfig,
) -> Result<TransitionMatrix, Error> {
    let dim = graph.registry().edge_type_count();
    if dim == 0 {
        return Err(Error::ZeroEdgeTypes);
    }
    let mut matrix = TransitionMatrix::uniform(dim)?;
    let mut weights: Vec<f64> = Vec::new();
    let mut edge_seq: Vec<EdgeTypeId> = Vec::new();
    for iteration in 0..config.em_iterations as u64 {
        let mut counts = vec![0u64; dim * dim];
        for start in 0..graph.node_count() as NodeId {
            for walk_no in 0..config.walks_per_node as u64 {
                let mut rng = Rng::from_stream(
                    config.seed,
                    &[STREAM_EM, iteration, start as u64, walk_no],
                );
                edge_seq.clear();
                let mut curr = start;
                let mut prev: Option<EdgeTypeId> = None;
                for _ in 1..config.walk_length {
                    match edge2vec_step_scratch(graph, prev, curr, &matrix, &mut rng, &mut weights)?
                    {
                        Some((node, edge_type, _)) => {
                            edge_seq.push(edge_type);
                            prev = Some(edge_type);
                            curr = node;
                        }
                        None => break,
                    }
                }
                // Symmetric co-occurrence counts within the window.
                for i in 0..edge_seq.len() {
                    let hi = (i + config.em_window).min(edge_seq.len().saturating_sub(1));
                    for j in (i + 1)..=hi {
                        let (a, b) = (edge_seq[i] as usize, edge_seq[j] as usize);
                        counts[a * dim + b] += 1;
                        counts[b * dim + a] += 1;
                    }
                }
            }
        }
        matrix = TransitionMatrix::from_counts(&counts, dim)?;
    }
    Ok(matrix)
}
