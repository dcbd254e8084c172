//! Walk-corpus generation.
//!
//! Four strategies over the same immutable graph: uniform first-order
//! walks, node2vec second-order biased walks, metapath-guided walks, and
//! edge2vec walks weighted by a trained edge-type transition matrix.
//! Each (start node, walk number) pair draws from its own RNG substream,
//! so a corpus is a pure function of (graph, config, seed) regardless of
//! the order walks are produced in.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::Error;
use crate::graph::{EdgeTypeId, HeteroGraph, NodeId, NodeTypeId, TypeRegistry};
use crate::rng::{fnv1a64, Rng};
use crate::transition::{self, TransitionMatrix};

/// Substream tag for corpus walks.
pub(crate) const STREAM_WALK: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Uniform,
    Node2vec,
    Metapath,
    Edge2vec,
}

impl Strategy {
    pub fn name(&self) -> &'static str {
        match self {
            Strategy::Uniform => "uniform",
            Strategy::Node2vec => "node2vec",
            Strategy::Metapath => "metapath",
            Strategy::Edge2vec => "edge2vec",
        }
    }

    pub fn parse(name: &str) -> Result<Self, Error> {
        match name {
            "uniform" => Ok(Strategy::Uniform),
            "node2vec" => Ok(Strategy::Node2vec),
            "metapath" => Ok(Strategy::Metapath),
            "edge2vec" => Ok(Strategy::Edge2vec),
            other => Err(Error::InvalidConfig(format!("unknown strategy: {other}"))),
        }
    }
}

impl core::fmt::Display for Strategy {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

/// Cyclic node-type pattern. The first and last types are equal, so the
/// expected type at walk position `i` is `types[i % (len - 1)]` for walks of
/// any length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Metapath {
    types: Vec<NodeTypeId>,
}

impl Metapath {
    pub fn from_type_ids(types: Vec<NodeTypeId>) -> Result<Self, Error> {
        if types.len() < 2 {
            return Err(Error::InvalidConfig(
                "metapath needs at least 2 types".into(),
            ));
        }
        if types.first() != types.last() {
            return Err(Error::InvalidConfig(
                "metapath must be cyclic (first type equals last)".into(),
            ));
        }
        Ok(Metapath { types })
    }

    pub fn from_names(registry: &TypeRegistry, names: &[&str]) -> Result<Self, Error> {
        let types = names
            .iter()
            .map(|n| {
                registry
                    .node_type_id(n)
                    .ok_or_else(|| Error::UnknownNodeType((*n).to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Metapath::from_type_ids(types)
    }

    pub fn types(&self) -> &[NodeTypeId] {
        &self.types
    }

    pub fn head(&self) -> NodeTypeId {
        self.types[0]
    }

    pub fn period(&self) -> usize {
        self.types.len() - 1
    }

    /// Node type a conforming walk must have at `position`.
    pub fn expected_type(&self, position: usize) -> NodeTypeId {
        self.types[position % self.period()]
    }
}

#[derive(Debug, Clone)]
pub struct WalkConfig {
    pub walk_length: usize,
    pub walks_per_node: usize,
    pub strategy: Strategy,
    /// node2vec return parameter.
    pub p: f64,
    /// node2vec in-out parameter.
    pub q: f64,
    pub metapath: Option<Metapath>,
    /// edge2vec EM iterations.
    pub em_iterations: usize,
    /// edge2vec co-occurrence window over a walk's edge-type sequence.
    pub em_window: usize,
    pub seed: u64,
}

impl Default for WalkConfig {
    fn default() -> Self {
        WalkConfig {
            walk_length: 20,
            walks_per_node: 10,
            strategy: Strategy::Uniform,
            p: 1.0,
            q: 1.0,
            metapath: None,
            em_iterations: 5,
            em_window: 2,
            seed: 0,
        }
    }
}

impl WalkConfig {
    pub fn validate(&self, graph: &HeteroGraph) -> Result<(), Error> {
        if self.walk_length < 2 {
            return Err(Error::InvalidConfig("walk_length must be >= 2".into()));
        }
        if self.walks_per_node < 1 {
            return Err(Error::InvalidConfig("walks_per_node must be >= 1".into()));
        }
        match self.strategy {
            Strategy::Node2vec => {
                if !(self.p > 0.0 && self.p.is_finite()) || !(self.q > 0.0 && self.q.is_finite()) {
                    return Err(Error::InvalidConfig(
                        "node2vec requires finite p > 0 and q > 0".into(),
                    ));
                }
            }
            Strategy::Metapath => {
                let mp = self
                    .metapath
                    .as_ref()
                    .ok_or_else(|| Error::InvalidConfig("metapath strategy needs a metapath".into()))?;
                for &ty in mp.types() {
                    if ty as usize >= graph.registry().node_type_count() {
                        return Err(Error::UnknownNodeType(format!("index {ty}")));
                    }
                }
            }
            Strategy::Edge2vec => {
                if self.em_iterations < 1 || self.em_window < 1 {
                    return Err(Error::InvalidConfig(
                        "edge2vec requires em_iterations >= 1 and em_window >= 1".into(),
                    ));
                }
            }
            Strategy::Uniform => {}
        }
        Ok(())
    }

    /// Stable fingerprint of every sampling-relevant field; recorded in
    /// corpus headers and run manifests.
    pub fn config_hash(&self) -> u64 {
        let metapath = match &self.metapath {
            Some(mp) => {
                let ids: Vec<String> = mp.types().iter().map(|t| t.to_string()).collect();
                ids.join("-")
            }
            None => String::from("-"),
        };
        let canonical = format!(
            "strategy={};walk_length={};walks_per_node={};p={};q={};metapath={};em_iterations={};em_window={};seed={}",
            self.strategy,
            self.walk_length,
            self.walks_per_node,
            self.p,
            self.q,
            metapath,
            self.em_iterations,
            self.em_window,
            self.seed,
        );
        fnv1a64(canonical.as_bytes())
    }
}

/// An ordered corpus of walks plus the provenance needed to reproduce it.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkCorpus {
    pub walks: Vec<Vec<NodeId>>,
    pub strategy: Strategy,
    pub seed: u64,
    pub config_hash: u64,
    /// Walks cut short by a dead end (no admissible neighbor).
    pub truncated_walks: u64,
    /// edge2vec steps where every candidate weight was zero and the step
    /// fell back to a uniform draw.
    pub zero_weight_fallbacks: u64,
}

impl WalkCorpus {
    pub fn token_count(&self) -> u64 {
        self.walks.iter().map(|w| w.len() as u64).sum()
    }
}

/// One generated walk.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkOutcome {
    pub nodes: Vec<NodeId>,
    pub truncated: bool,
    pub zero_weight_fallbacks: u64,
}

/// node2vec second-order bias: 1/p to return to the previous node, 1 for a
/// candidate adjacent to it, 1/q otherwise.
pub fn node2vec_weight(
    graph: &HeteroGraph,
    prev: NodeId,
    curr: NodeId,
    candidate: NodeId,
    p: f64,
    q: f64,
) -> Result<f64, Error> {
    if !(p > 0.0 && p.is_finite()) || !(q > 0.0 && q.is_finite()) {
        return Err(Error::InvalidConfig(
            "node2vec requires finite p > 0 and q > 0".into(),
        ));
    }
    for node in [prev, curr, candidate] {
        if node as usize >= graph.node_count() {
            return Err(Error::NodeOutOfRange {
                index: node,
                node_count: graph.node_count() as u32,
            });
        }
    }
    Ok(n2v_weight_unchecked(graph, prev, candidate, 1.0 / p, 1.0 / q))
}

#[inline]
fn n2v_weight_unchecked(
    graph: &HeteroGraph,
    prev: NodeId,
    candidate: NodeId,
    inv_p: f64,
    inv_q: f64,
) -> f64 {
    if candidate == prev {
        inv_p
    } else if graph.has_edge_unchecked(prev, candidate) {
        1.0
    } else {
        inv_q
    }
}

/// Uniformly samples a neighbor of `curr` whose node type is
/// `expected_type`; `None` marks a dead end.
pub fn metapath_next(
    graph: &HeteroGraph,
    curr: NodeId,
    expected_type: NodeTypeId,
    rng: &mut Rng,
) -> Result<Option<(NodeId, EdgeTypeId)>, Error> {
    if expected_type as usize >= graph.registry().node_type_count() {
        return Err(Error::UnknownNodeType(format!("index {expected_type}")));
    }
    let neighbors = graph.neighbors(curr)?;
    let matching = neighbors
        .iter()
        .filter(|(n, _)| graph.node_type(*n) == Some(expected_type))
        .count();
    if matching == 0 {
        return Ok(None);
    }
    let pick = rng.next_index(matching);
    Ok(neighbors
        .iter()
        .filter(|(n, _)| graph.node_type(*n) == Some(expected_type))
        .nth(pick)
        .copied())
}

/// Samples an index proportionally to `weights` using one uniform draw and
/// a cumulative scan. All strategies funnel through this, so strategies
/// whose weights coincide (e.g. node2vec with p = q = 1 versus uniform)
/// consume randomness identically and produce identical walks.
pub(crate) fn pick_weighted(rng: &mut Rng, weights: &[f64]) -> usize {
    debug_assert!(!weights.is_empty());
    let total: f64 = weights.iter().sum();
    debug_assert!(total > 0.0);
    let x = rng.next_f64() * total;
    let mut acc = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        acc += w;
        if x < acc {
            return i;
        }
    }
    // Rounding pushed x to the top of the range; take the last nonzero.
    weights
        .iter()
        .rposition(|&w| w > 0.0)
        .unwrap_or(weights.len() - 1)
}

/// Start nodes in corpus order: every node for uniform/node2vec/edge2vec,
/// nodes of the metapath head type for metapath walks.
pub fn walk_start_nodes(graph: &HeteroGraph, config: &WalkConfig) -> Result<Vec<NodeId>, Error> {
    match config.strategy {
        Strategy::Metapath => {
            let mp = config
                .metapath
                .as_ref()
                .ok_or_else(|| Error::InvalidConfig("metapath strategy needs a metapath".into()))?;
            let starts = graph.nodes_by_type(mp.head())?;
            if starts.is_empty() {
                let name = graph
                    .registry()
                    .node_type_name(mp.head())
                    .unwrap_or("?")
                    .to_string();
                return Err(Error::NoStartNodes(name));
            }
            Ok(starts)
        }
        _ => Ok((0..graph.node_count() as NodeId).collect()),
    }
}

/// Generates the walk identified by (start, walk_no). Deterministic in
/// (graph, config, start, walk_no); callers may fan walks out across
/// threads and still assemble a corpus identical to the serial one.
pub fn generate_walk(
    graph: &HeteroGraph,
    config: &WalkConfig,
    matrix: Option<&TransitionMatrix>,
    start: NodeId,
    walk_no: u64,
) -> Result<WalkOutcome, Error> {
    if start as usize >= graph.node_count() {
        return Err(Error::NodeOutOfRange {
            index: start,
            node_count: graph.node_count() as u32,
        });
    }
    let mut rng = Rng::from_stream(config.seed, &[STREAM_WALK, start as u64, walk_no]);
    let mut nodes = Vec::with_capacity(config.walk_length);
    nodes.push(start);
    let mut truncated = false;
    let mut fallbacks = 0u64;
    let mut weights: Vec<f64> = Vec::new();

    match config.strategy {
        Strategy::Uniform => {
            while nodes.len() < config.walk_length {
                let curr = *nodes.last().unwrap();
                let neighbors = graph.neighbors(curr)?;
                if neighbors.is_empty() {
                    truncated = true;
                    break;
                }
                weights.clear();
                weights.resize(neighbors.len(), 1.0);
                let pick = pick_weighted(&mut rng, &weights);
                nodes.push(neighbors[pick].0);
            }
        }
        Strategy::Node2vec => {
            let inv_p = 1.0 / config.p;
            let inv_q = 1.0 / config.q;
            while nodes.len() < config.walk_length {
                let curr = *nodes.last().unwrap();
                let neighbors = graph.neighbors(curr)?;
                if neighbors.is_empty() {
                    truncated = true;
                    break;
                }
                weights.clear();
                if nodes.len() == 1 {
                    // No previous node yet: first transition is uniform.
                    weights.resize(neighbors.len(), 1.0);
                } else {
                    let prev = nodes[nodes.len() - 2];
                    weights.extend(
                        neighbors
                            .iter()
                            .map(|&(cand, _)| n2v_weight_unchecked(graph, prev, cand, inv_p, inv_q)),
                    );
                }
                let pick = pick_weighted(&mut rng, &weights);
                nodes.push(neighbors[pick].0);
            }
        }
        Strategy::Metapath => {
            let mp = config
                .metapath
                .as_ref()
                .ok_or_else(|| Error::InvalidConfig("metapath strategy needs a metapath".into()))?;
            if graph.node_type(start) != Some(mp.head()) {
                return Err(Error::InvalidConfig(format!(
                    "metapath walk started at node {start} whose type does not match the pattern head"
                )));
            }
            while nodes.len() < config.walk_length {
                let curr = *nodes.last().unwrap();
                let expected = mp.expected_type(nodes.len());
                match metapath_next(graph, curr, expected, &mut rng)? {
                    Some((next, _)) => nodes.push(next),
                    None => {
                        truncated = true;
                        break;
                    }
                }
            }
        }
        Strategy::Edge2vec => {
            let matrix = matrix.ok_or_else(|| {
                Error::InvalidConfig("edge2vec walk requires a transition matrix".into())
            })?;
            let mut prev_edge: Option<EdgeTypeId> = None;
            while nodes.len() < config.walk_length {
                let curr = *nodes.last().unwrap();
                match transition::edge2vec_step_scratch(
                    graph,
                    prev_edge,
                    curr,
                    matrix,
                    &mut rng,
                    &mut weights,
                )? {
                    Some((next, edge_type, fell_back)) => {
                        if fell_back {
                            fallbacks += 1;
                        }
                        prev_edge = Some(edge_type);
                        nodes.push(next);
                    }
                    None => {
                        truncated = true;
                        break;
                    }
                }
            }
        }
    }

    Ok(WalkOutcome {
        nodes,
        truncated,
        zero_weight_fallbacks: fallbacks,
    })
}

/// Generates the full corpus: `walks_per_node` walks from every start node,
/// ordered by (start node, walk number). For edge2vec the transition matrix
/// is trained first.
pub fn generate_corpus(graph: &HeteroGraph, config: &WalkConfig) -> Result<WalkCorpus, Error> {
    config.validate(graph)?;
    let matrix = match config.strategy {
        Strategy::Edge2vec => Some(transition::em_train_transition(graph, config)?),
        _ => None,
    };
    let starts = walk_start_nodes(graph, config)?;
    let mut walks = Vec::with_capacity(starts.len() * config.walks_per_node);
    let mut truncated = 0u64;
    let mut fallbacks = 0u64;
    for &start in &starts {
        for walk_no in 0..config.walks_per_node as u64 {
            let outcome = generate_walk(graph, config, matrix.as_ref(), start, walk_no)?;
            truncated += outcome.truncated as u64;
            fallbacks += outcome.zero_weight_fallbacks;
            walks.push(outcome.nodes);
        }
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
