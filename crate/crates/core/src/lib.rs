//! Heterogeneous-graph node embeddings and link ranking.
//!
//! The pipeline: ingest subject/predicate/object triples into a typed CSR
//! graph, sample a walk corpus (uniform, node2vec, metapath-guided, or
//! edge2vec transition-weighted), train skip-gram embeddings with negative
//! sampling, then predict missing links by top-K cosine ranking — with a
//! logistic-regression link predictor as the comparison baseline.
//!
//! This crate is `no_std` + `alloc`; file formats, the CLI, and thread
//! parallelism live in the companion `walkrank` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod error;
pub mod eval;
pub mod graph;
pub mod logreg;
pub mod math;
pub mod rank;
pub mod rng;
pub mod train;
pub mod transition;
pub mod vocab;
pub mod walk;

pub use error::Error;
pub use graph::{HeteroGraph, TypeRule, TypeRuleSet};
pub use train::{EmbeddingMatrix, TrainConfig};
pub use walk::{Metapath, Strategy, WalkConfig, WalkCorpus};
