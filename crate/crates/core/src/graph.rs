//! Typed heterogeneous graph built from subject/predicate/object triples.
//!
//! URIs are interned into dense `u32` indices, node types are inferred from
//! the URI via an ordered rule set, and adjacency is stored in compressed
//! sparse row form. Every ingested triple contributes adjacency in both
//! directions; the original orientation and predicate survive as edge-list
//! and edge-type metadata. The graph is immutable once built and safe to
//! share across readers.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use hashbrown::{HashMap, HashSet};

use crate::error::Error;

pub type NodeId = u32;
pub type NodeTypeId = u32;
pub type EdgeTypeId = u32;

/// Type name used when a URI has fewer than two path segments and no rule
/// matches.
pub const DEFAULT_NODE_TYPE: &str = "node";

/// Dense, bidirectional name <-> index registry for node and edge types.
#[derive(Debug, Clone, Default)]
pub struct TypeRegistry {
    node_type_names: Vec<String>,
    edge_type_names: Vec<String>,
    node_type_index: HashMap<String, NodeTypeId>,
    edge_type_index: HashMap<String, EdgeTypeId>,
}

impl TypeRegistry {
    fn intern_node_type(&mut self, name: &str) -> NodeTypeId {
        if let Some(&id) = self.node_type_index.get(name) {
            return id;
        }
        let id = self.node_type_names.len() as NodeTypeId;
        self.node_type_names.push(name.to_string());
        self.node_type_index.insert(name.to_string(), id);
        id
    }

    fn intern_edge_type(&mut self, name: &str) -> EdgeTypeId {
        if let Some(&id) = self.edge_type_index.get(name) {
            return id;
        }
        let id = self.edge_type_names.len() as EdgeTypeId;
        self.edge_type_names.push(name.to_string());
        self.edge_type_index.insert(name.to_string(), id);
        id
    }

    pub fn node_type_id(&self, name: &str) -> Option<NodeTypeId> {
        self.node_type_index.get(name).copied()
    }

    pub fn edge_type_id(&self, name: &str) -> Option<EdgeTypeId> {
        self.edge_type_index.get(name).copied()
    }

    pub fn node_type_name(&self, id: NodeTypeId) -> Option<&str> {
        self.node_type_names.get(id as usize).map(String::as_str)
    }

    pub fn edge_type_name(&self, id: EdgeTypeId) -> Option<&str> {
        self.edge_type_names.get(id as usize).map(String::as_str)
    }

    pub fn node_type_count(&self) -> usize {
        self.node_type_names.len()
    }

    pub fn edge_type_count(&self) -> usize {
        self.edge_type_names.len()
    }

    pub fn node_type_names(&self) -> &[String] {
        &self.node_type_names
    }

    pub fn edge_type_names(&self) -> &[String] {
        &self.edge_type_names
    }
}

/// One substring-match rule: the first rule whose pattern occurs in the URI
/// assigns the type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeRule {
    pub pattern: String,
    pub type_name: String,
}

/// Ordered rule list with a positional fallback: the second-to-last path
/// segment of the URI (`.../pubchem_compound/467801` -> `pubchem_compound`).
#[derive(Debug, Clone, Default)]
pub struct TypeRuleSet {
    rules: Vec<TypeRule>,
}

impl TypeRuleSet {
    pub fn new(rules: Vec<TypeRule>) -> Self {
        TypeRuleSet { rules }
    }

    pub fn empty() -> Self {
        TypeRuleSet { rules: Vec::new() }
    }

    pub fn rules(&self) -> &[TypeRule] {
        &self.rules
    }

    pub fn infer<'a>(&'a self, uri: &'a str) -> &'a str {
        for rule in &self.rules {
            if uri.contains(rule.pattern.as_str()) {
                return &rule.type_name;
            }
        }
        fallback_type(uri)
    }
}

/// Second-to-last non-empty `/`-separated segment, or [`DEFAULT_NODE_TYPE`]
/// when the URI has fewer than two segments.
pub fn fallback_type(uri: &str) -> &str {
    let mut last = None;
    let mut second_to_last = None;
    for segment in uri.split('/') {
        if segment.is_empty() {
            continue;
        }
        second_to_last = last;
        last = Some(segment);
    }
    second_to_last.unwrap_or(DEFAULT_NODE_TYPE)
}

/// Counters kept while parsing triples.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IngestStats {
    pub lines_read: u64,
    pub lines_skipped: u64,
    pub triples_ingested: u64,
    pub duplicates_dropped: u64,
    pub self_loops_dropped: u64,
}

/// Immutable typed graph with CSR adjacency.
#[derive(Debug, Clone)]
pub struct HeteroGraph {
    node_uris: Vec<String>,
    node_types: Vec<NodeTypeId>,
    uri_index: HashMap<String, NodeId>,
    /// Deduplicated edges in first-seen orientation.
    edge_list: Vec<(NodeId, NodeId, EdgeTypeId)>,
    /// node_count + 1 offsets into `csr_neighbors`.
    csr_offsets: Vec<usize>,
    /// (neighbor, edge type), sorted by neighbor then edge type within each
    /// node's range.
    csr_neighbors: Vec<(NodeId, EdgeTypeId)>,
    registry: TypeRegistry,
    stats: IngestStats,
}

impl HeteroGraph {
    pub fn node_count(&self) -> usize {
        self.node_uris.len()
    }

    /// Number of deduplicated undirected edges. The CSR arrays hold twice
    /// this many directed half-edges.
    pub fn edge_count(&self) -> usize {
        self.edge_list.len()
    }

    pub fn uri(&self, node: NodeId) -> Option<&str> {
        self.node_uris.get(node as usize).map(String::as_str)
    }

    pub fn uris(&self) -> &[String] {
        &self.node_uris
    }

    pub fn node_id(&self, uri: &str) -> Option<NodeId> {
        self.uri_index.get(uri).copied()
    }

    pub fn node_type(&self, node: NodeId) -> Option<NodeTypeId> {
        self.node_types.get(node as usize).copied()
    }

    pub fn node_types(&self) -> &[NodeTypeId] {
        &self.node_types
    }

    pub fn edge_list(&self) -> &[(NodeId, NodeId, EdgeTypeId)] {
        &self.edge_list
    }

    pub fn csr_offsets(&self) -> &[usize] {
        &self.csr_offsets
    }

    pub fn csr_neighbors(&self) -> &[(NodeId, EdgeTypeId)] {
        &self.csr_neighbors
    }

    pub fn registry(&self) -> &TypeRegistry {
        &self.registry
    }

    pub fn stats(&self) -> &IngestStats {
        &self.stats
    }

    fn check_node(&self, node: NodeId) -> Result<(), Error> {
        if (node as usize) < self.node_count() {
            Ok(())
        } else {
            Err(Error::NodeOutOfRange {
                index: node,
                node_count: self.node_count() as u32,
            })
        }
    }

    /// The node's CSR range: (neighbor, edge type) pairs sorted by neighbor.
    pub fn neighbors(&self, node: NodeId) -> Result<&[(NodeId, EdgeTypeId)], Error> {
        self.check_node(node)?;
        let lo = self.csr_offsets[node as usize];
        let hi = self.csr_offsets[node as usize + 1];
        Ok(&self.csr_neighbors[lo..hi])
    }

    pub fn degree(&self, node: NodeId) -> Result<usize, Error> {
        Ok(self.neighbors(node)?.len())
    }

    /// True iff v appears in u's CSR range. Symmetric, since every edge is
    /// stored in both directions.
    pub fn has_edge(&self, u: NodeId, v: NodeId) -> Result<bool, Error> {
        self.check_node(v)?;
        let range = self.neighbors(u)?;
        Ok(range.binary_search_by(|entry| entry.0.cmp(&v)).is_ok())
    }

    #[inline]
    pub(crate) fn has_edge_unchecked(&self, u: NodeId, v: NodeId) -> bool {
        let lo = self.csr_offsets[u as usize];
        let hi = self.csr_offsets[u as usize + 1];
        self.csr_neighbors[lo..hi]
            .binary_search_by(|entry| entry.0.cmp(&v))
            .is_ok()
    }

    /// All nodes of the given type, ascending.
    pub fn nodes_by_type(&self, ty: NodeTypeId) -> Result<Vec<NodeId>, Error> {
        if (ty as usize) >= self.registry.node_type_count() {
            return Err(Error::UnknownNodeType(alloc::format!("index {ty}")));
        }
        Ok(self
            .node_types
            .iter()
            .enumerate()
            .filter(|(_, &t)| t == ty)
            .map(|(i, _)| i as NodeId)
            .collect())
    }

    /// Construct a graph directly from pre-validated parts. Used by cache
    /// loaders; `ingest_triples` is the normal entry point.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        node_uris: Vec<String>,
        node_types: Vec<NodeTypeId>,
        edge_list: Vec<(NodeId, NodeId, EdgeTypeId)>,
        csr_offsets: Vec<usize>,
        csr_neighbors: Vec<(NodeId, EdgeTypeId)>,
        node_type_names: Vec<String>,
        edge_type_names: Vec<String>,
        stats: IngestStats,
    ) -> Result<Self, Error> {
        if node_uris.is_empty() {
            return Err(Error::EmptyGraph);
        }
        if node_types.len() != node_uris.len()
            || csr_offsets.len() != node_uris.len() + 1
            || *csr_offsets.last().unwrap() != csr_neighbors.len()
        {
            return Err(Error::InvalidConfig("inconsistent graph arrays".into()));
        }
        let mut registry = TypeRegistry::default();
        for name in &node_type_names {
            registry.intern_node_type(name);
        }
        for name in &edge_type_names {
            registry.intern_edge_type(name);
        }
        let uri_index = node_uris
            .iter()
            .enumerate()
            .map(|(i, u)| (u.clone(), i as NodeId))
            .collect();
        Ok(HeteroGraph {
            node_uris,
            node_types,
            uri_index,
            edge_list,
            csr_offsets,
            csr_neighbors,
            registry,
            stats,
        })
    }
}

/// Incremental triple parser; `finish` builds the CSR arrays.
pub struct GraphBuilder {
    rules: TypeRuleSet,
    registry: TypeRegistry,
    uri_index: HashMap<String, NodeId>,
    node_uris: Vec<String>,
    node_types: Vec<NodeTypeId>,
    edge_list: Vec<(NodeId, NodeId, EdgeTypeId)>,
    seen: HashSet<(NodeId, NodeId, EdgeTypeId)>,
    stats: IngestStats,
}

impl GraphBuilder {
    pub fn new(rules: TypeRuleSet) -> Self {
        let mut registry = TypeRegistry::default();
        // Rule targets are registered up front so a type can exist with no
        // members and so registry order does not depend on input order.
        for rule in rules.rules() {
            registry.intern_node_type(&rule.type_name);
        }
        GraphBuilder {
            rules,
            registry,
            uri_index: HashMap::new(),
            node_uris: Vec::new(),
            node_types: Vec::new(),
            edge_list: Vec::new(),
            seen: HashSet::new(),
            stats: IngestStats::default(),
        }
    }

    fn intern_node(&mut self, uri: &str) -> NodeId {
        if let Some(&id) = self.uri_index.get(uri) {
            return id;
        }
        let id = self.node_uris.len() as NodeId;
        let ty = self.registry.intern_node_type(self.rules.infer(uri));
        self.node_uris.push(uri.to_string());
        self.node_types.push(ty);
        self.uri_index.insert(uri.to_string(), id);
        id
    }

    /// Parses one line. Accepts N-Triples-like `<s> <p> <o> .` and TSV
    /// `s<TAB>p<TAB>o`; blank lines and `#` comments are skipped.
    pub fn add_line(&mut self, line: &str) -> Result<(), Error> {
        self.stats.lines_read += 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            self.stats.lines_skipped += 1;
            return Ok(());
        }
        let (s, p, o) = parse_triple(trimmed).map_err(|message| Error::Parse {
            line: self.stats.lines_read,
            message,
        })?;
        let s_id = self.intern_node(s);
        let o_id = self.intern_node(o);
        if s_id == o_id {
            self.stats.self_loops_dropped += 1;
            return Ok(());
        }
        let e_id = self.registry.intern_edge_type(p);
        // Undirected dedup: a repeat of the same triple, or its reversal
        // under the same predicate, is one edge.
        let key = (s_id.min(o_id), s_id.max(o_id), e_id);
        if !self.seen.insert(key) {
            self.stats.duplicates_dropped += 1;
            return Ok(());
        }
        self.edge_list.push((s_id, o_id, e_id));
        self.stats.triples_ingested += 1;
        Ok(())
    }

    pub fn finish(self) -> Result<HeteroGraph, Error> {
        let n = self.node_uris.len();
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut degree = vec![0usize; n];
        for &(s, d, _) in &self.edge_list {
            degree[s as usize] += 1;
            degree[d as usize] += 1;
        }
        let mut csr_offsets = Vec::with_capacity(n + 1);
        let mut acc = 0usize;
        csr_offsets.push(0);
        for &d in &degree {
            acc += d;
            csr_offsets.push(acc);
        }
        let mut csr_neighbors = vec![(0 as NodeId, 0 as EdgeTypeId); acc];
        let mut cursor = csr_offsets.clone();
        for &(s, d, t) in &self.edge_list {
            csr_neighbors[cursor[s as usize]] = (d, t);
            cursor[s as usize] += 1;
            csr_neighbors[cursor[d as usize]] = (s, t);
            cursor[d as usize] += 1;
        }
        for node in 0..n {
            csr_neighbors[csr_offsets[node]..csr_offsets[node + 1]].sort_unstable();
        }
        Ok(HeteroGraph {
            node_uris: self.node_uris,
            node_types: self.node_types,
            uri_index: self.uri_index,
            edge_list: self.edge_list,
            csr_offsets,
            csr_neighbors,
            registry: self.registry,
            stats: self.stats,
        })
    }
}

fn strip_angle(token: &str) -> &str {
    if token.len() >= 2 && token.starts_with('<') && token.ends_with('>') {
        &token[1..token.len() - 1]
    } else {
        token
    }
}

fn checked<'a>(s: &'a str, p: &'a str, o: &'a str) -> Result<(&'a str, &'a str, &'a str), String> {
    let (s, p, o) = (strip_angle(s), strip_angle(p), strip_angle(o));
    if s.is_empty() || p.is_empty() || o.is_empty() || s == "." || o == "." {
        Err("empty or malformed triple term".to_string())
    } else {
        Ok((s, p, o))
    }
}

fn parse_triple(line: &str) -> Result<(&str, &str, &str), String> {
    if line.contains('\t') {
        let mut fields = line.split('\t').map(str::trim);
        let s = fields.next().unwrap_or("");
        let p = fields.next().unwrap_or("");
        let o = fields.next().unwrap_or("");
        if fields.next().is_some() {
            return Err("expected exactly 3 tab-separated fields".to_string());
        }
        return checked(s, p, o);
    }
    let tokens: Vec<&str> = line.split_whitespace().collect();
    match tokens.as_slice() {
        [s, p, o] => checked(s, p, o),
        [s, p, o, "."] => checked(s, p, o),
        _ => Err("expected `<s> <p> <o> .` or `s<TAB>p<TAB>o`".to_string()),
    }
}

/// Parses every line and builds the graph.
pub fn ingest_triples<'a, I>(lines: I, rules: TypeRuleSet) -> Result<HeteroGraph, Error>
where
    I: IntoIterator<Item = &'a str>,
{
    let mut builder = GraphBuilder::new(rules);
    for line in lines {
        builder.add_line(line)?;
    }
    builder.finish()
}

/// Test fixture shared across modules: one compound linked to 16 genes,
/// mirroring the Apicidin neighborhood used in the CLI examples.
#[cfg(test)]
pub(crate) fn apicidin_fixture() -> String {
    const COMPOUND: &str = "http://chem2bio2rdf.org/pubchem/resource/pubchem_compound/467801";
    let genes = [
        "HDAC5", "HDAC6", "HDAC10", "HDAH", "HDAC4", "HDAC7", "NCOR2", "HDAC11", "F3",
        "HDAC106", "HDAC1", "HDAC9", "HDAC8", "HDAC2", "HDAC3", "HD1B",
    ];
    let mut out = String::new();
    for g in genes {
        out.push_str(&alloc::format!(
            "<{COMPOUND}> <http://chem2bio2rdf.org/uniprot/resource/bind> <http://chem2bio2rdf.org/uniprot/resource/gene/{g}> .\n"
        ));
    }
    out
}
