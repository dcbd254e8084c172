//! Versioned binary graph cache for fast reload: counts, string tables,
//! type assignments, edge list, and the CSR arrays, all little-endian.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use walkrank_core::graph::{HeteroGraph, IngestStats};

use super::{write_str, write_u32, write_u64, Reader};
use crate::error::{io_err, CliError};

const MAGIC: &[u8; 4] = b"WKGC";
const VERSION: u32 = 1;

pub fn save_graph(graph: &HeteroGraph, path: &Path) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(file);
    let write = |w: &mut BufWriter<File>| -> std::io::Result<()> {
        w.write_all(MAGIC)?;
        write_u32(w, VERSION)?;
        let registry = graph.registry();
        write_u64(w, graph.node_count() as u64)?;
        write_u64(w, graph.edge_count() as u64)?;
        write_u64(w, registry.node_type_count() as u64)?;
        write_u64(w, registry.edge_type_count() as u64)?;
        for name in registry.node_type_names() {
            write_str(w, name)?;
        }
        for name in registry.edge_type_names() {
            write_str(w, name)?;
        }
        for uri in graph.uris() {
            write_str(w, uri)?;
        }
        for &ty in graph.node_types() {
            write_u32(w, ty)?;
        }
        for &(s, d, t) in graph.edge_list() {
            write_u32(w, s)?;
            write_u32(w, d)?;
            write_u32(w, t)?;
        }
        for &offset in graph.csr_offsets() {
            write_u64(w, offset as u64)?;
        }
        for &(n, t) in graph.csr_neighbors() {
            write_u32(w, n)?;
            write_u32(w, t)?;
        }
        let stats = graph.stats();
        write_u64(w, stats.lines_read)?;
        write_u64(w, stats.lines_skipped)?;
        write_u64(w, stats.triples_ingested)?;
        write_u64(w, stats.duplicates_dropped)?;
        write_u64(w, stats.self_loops_dropped)?;
        w.flush()
    };
    write(&mut w).map_err(|e| io_err(path, e))
}

pub fn load_graph(path: &Path) -> Result<HeteroGraph, CliError> {
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    let mut r = Reader::new(BufReader::new(file), "graph cache");
    r.magic(MAGIC)?;
    let version = r.u32()?;
    if version != VERSION {
        return Err(CliError::Data(format!(
            "graph cache version mismatch: file has {version}, expected {VERSION}"
        )));
    }
    let node_count = r.u64()? as usize;
    let edge_count = r.u64()? as usize;
    let node_type_count = r.u64()? as usize;
    let edge_type_count = r.u64()? as usize;

    let mut node_type_names = Vec::with_capacity(node_type_count);
    for _ in 0..node_type_count {
        node_type_names.push(r.string()?);
    }
    let mut edge_type_names = Vec::with_capacity(edge_type_count);
    for _ in 0..edge_type_count {
        edge_type_names.push(r.string()?);
    }
    let mut node_uris = Vec::with_capacity(node_count);
    for _ in 0..node_count {
        node_uris.push(r.string()?);
    }
    let mut node_types = Vec::with_capacity(node_count);
    for _ in 0..node_count {
        node_types.push(r.u32()?);
    }
    let mut edge_list = Vec::with_capacity(edge_count);
    for _ in 0..edge_count {
        edge_list.push((r.u32()?, r.u32()?, r.u32()?));
    }
    let mut csr_offsets = Vec::with_capacity(node_count + 1);
    for _ in 0..node_count + 1 {
        csr_offsets.push(r.u64()? as usize);
    }
    let mut csr_neighbors = Vec::with_capacity(2 * edge_count);
    for _ in 0..2 * edge_count {
        csr_neighbors.push((r.u32()?, r.u32()?));
    }
    let stats = IngestStats {
        lines_read: r.u64()?,
        lines_skipped: r.u64()?,
        triples_ingested: r.u64()?,
        duplicates_dropped: r.u64()?,
        self_loops_dropped: r.u64()?,
    };
    r.expect_eof()?;

    HeteroGraph::from_parts(
        node_uris,
        node_types,
        edge_list,
        csr_offsets,
        csr_neighbors,
        node_type_names,
        edge_type_names,
        stats,
    )
    .map_err(CliError::from)
}
