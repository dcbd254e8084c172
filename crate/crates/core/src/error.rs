use alloc::string::String;
use core::fmt;

/// Errors produced by graph construction, sampling, training, and evaluation.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A triple or CSV line could not be parsed. Line numbers are 1-based.
    Parse { line: u64, message: String },
    /// No nodes were ingested.
    EmptyGraph,
    /// An operation was given nothing to work on.
    EmptyInput(&'static str),
    /// A node index outside `0..node_count`.
    NodeOutOfRange { index: u32, node_count: u32 },
    /// A node-type name or index that is not registered.
    UnknownNodeType(String),
    /// An edge-type index that is not registered.
    UnknownEdgeType(u32),
    /// A URI with no row in the embedding vocabulary.
    UnknownNode(String),
    /// A configuration value violates its documented range.
    InvalidConfig(String),
    /// A walk strategy has no admissible start nodes (names the type).
    NoStartNodes(String),
    /// edge2vec cannot run on a graph with no edge types.
    ZeroEdgeTypes,
    /// A vector involved in a numeric operation is not finite.
    NonFinite(&'static str),
    /// Cosine similarity of a zero-norm vector is undefined.
    ZeroNorm,
    /// Two vectors that must share a dimension do not.
    DimensionMismatch { expected: usize, actual: usize },
    /// The same (source, target) pair appears with both labels.
    ConflictingLabel { source: String, target: String },
    /// A prediction has no matching labeled pair (or vice versa).
    KeyMismatch { source: String, target: String },
    /// Classifier training needs at least one example of each class.
    SingleClass,
    /// Negative sampling exhausted its rejection budget.
    GraphTooDense,
    /// Fewer matching edges than requested positives.
    InsufficientEdges { available: usize, requested: usize },
    /// Every pair in the evaluation set was out of vocabulary.
    NoEvaluablePairs,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Parse { line, message } => write!(f, "parse error at line {line}: {message}"),
            Error::EmptyGraph => write!(f, "empty graph"),
            Error::EmptyInput(what) => write!(f, "empty input: {what}"),
            Error::NodeOutOfRange { index, node_count } => {
                write!(f, "node index {index} out of range (node count {node_count})")
            }
            Error::UnknownNodeType(name) => write!(f, "unknown node type: {name}"),
            Error::UnknownEdgeType(id) => write!(f, "unknown edge type index: {id}"),
            Error::UnknownNode(uri) => write!(f, "node not in vocabulary: {uri}"),
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
            Error::NoStartNodes(ty) => write!(f, "no start nodes of type: {ty}"),
            Error::ZeroEdgeTypes => write!(f, "graph has no edge types"),
            Error::NonFinite(what) => write!(f, "non-finite value in {what}"),
            Error::ZeroNorm => write!(f, "undefined similarity: zero-norm vector"),
            Error::DimensionMismatch { expected, actual } => {
                write!(f, "dimension mismatch: expected {expected}, got {actual}")
            }
            Error::ConflictingLabel { source, target } => {
                write!(f, "conflicting labels for pair ({source}, {target})")
            }
            Error::KeyMismatch { source, target } => {
                write!(f, "prediction/label key mismatch for pair ({source}, {target})")
            }
            Error::SingleClass => write!(f, "training data contains a single class"),
            Error::GraphTooDense => write!(f, "graph too dense: negative sampling budget exhausted"),
            Error::InsufficientEdges { available, requested } => {
                write!(f, "insufficient edges: {available} available, {requested} requested")
            }
            Error::NoEvaluablePairs => write!(f, "no evaluable pairs"),
        }
    }
}

impl core::error::Error for Error {}
