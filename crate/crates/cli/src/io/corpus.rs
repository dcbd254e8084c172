//! Corpus files: one walk per line as space-separated node URIs, preceded
//! by a comment header recording strategy, seed, and config hash.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use walkrank_core::graph::HeteroGraph;
use walkrank_core::walk::{Strategy, WalkCorpus};

use crate::error::{io_err, CliError};

pub fn write_corpus(corpus: &WalkCorpus, uris: &[String], path: &Path) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(file);
    let write = |w: &mut BufWriter<File>| -> std::io::Result<()> {
        writeln!(
            w,
            "# strategy={} seed={} config_hash={:016x} walks={} truncated={} zero_weight_fallbacks={}",
            corpus.strategy,
            corpus.seed,
            corpus.config_hash,
            corpus.walks.len(),
            corpus.truncated_walks,
            corpus.zero_weight_fallbacks,
        )?;
        for walk in &corpus.walks {
            let mut first = true;
            for &node in walk {
                if !first {
                    w.write_all(b" ")?;
                }
                w.write_all(uris[node as usize].as_bytes())?;
                first = false;
            }
            w.write_all(b"\n")?;
        }
        w.flush()
    };
    write(&mut w).map_err(|e| io_err(path, e))
}

/// Reads a corpus file back, resolving URIs through the graph. Walk
/// provenance comes from the header; drop counters are not round-tripped.
pub fn read_corpus(path: &Path, graph: &HeteroGraph) -> Result<WalkCorpus, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut strategy = Strategy::Uniform;
    let mut seed = 0u64;
    let mut config_hash = 0u64;
    let mut walks = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(header) = trimmed.strip_prefix('#') {
            for field in header.split_whitespace() {
                if let Some(v) = field.strip_prefix("strategy=") {
                    strategy = Strategy::parse(v).map_err(CliError::from)?;
                } else if let Some(v) = field.strip_prefix("seed=") {
                    seed = v.parse().map_err(|_| {
                        CliError::data(format!("{}:{}: bad seed", path.display(), i + 1))
                    })?;
                } else if let Some(v) = field.strip_prefix("config_hash=") {
                    config_hash = u64::from_str_radix(v, 16).map_err(|_| {
                        CliError::data(format!("{}:{}: bad config hash", path.display(), i + 1))
                    })?;
                }
            }
            continue;
        }
        let mut walk = Vec::new();
        for uri in trimmed.split(' ') {
            let node = graph.node_id(uri).ok_or_else(|| {
                CliError::data(format!(
                    "{}:{}: URI not in graph: {uri}",
                    path.display(),
                    i + 1
                ))
            })?;
            walk.push(node);
        }
        walks.push(walk);
    }
    Ok(WalkCorpus {
        walks,
        strategy,
        seed,
        config_hash,
        truncated_walks: 0,
        zero_weight_fallbacks: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use walkrank_core::graph::ingest_triples;
    use walkrank_core::walk::{generate_corpus, WalkConfig};
    use walkrank_core::TypeRuleSet;

    #[test]
    fn corpus_file_round_trips_walks() {
        let text = "<t/n/a> <p> <t/n/b> .\n<t/n/b> <p> <t/n/c> .";
        let graph = ingest_triples(text.lines(), TypeRuleSet::empty()).unwrap();
        let config = WalkConfig {
            walk_length: 6,
            walks_per_node: 2,
            seed: 13,
            ..WalkConfig::default()
        };
        let corpus = generate_corpus(&graph, &config).unwrap();

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("corpus.txt");
        write_corpus(&corpus, graph.uris(), &path).unwrap();

        let head = std::fs::read_to_string(&path).unwrap();
        assert!(head.starts_with(&format!(
            "# strategy=uniform seed=13 config_hash={:016x}",
            config.config_hash()
        )));

        let loaded = read_corpus(&path, &graph).unwrap();
        assert_eq!(loaded.walks, corpus.walks);
        assert_eq!(loaded.seed, corpus.seed);
        assert_eq!(loaded.config_hash, corpus.config_hash);
        assert_eq!(loaded.strategy, corpus.strategy);
    }

    #[test]
    fn unknown_uri_is_rejected() {
        let graph =
            ingest_triples("<t/n/a> <p> <t/n/b> .".lines(), TypeRuleSet::empty()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("corpus.txt");
        std::fs::write(&path, "t/n/a t/n/ghost\n").unwrap();
        assert!(read_corpus(&path, &graph).is_err());
    }
}
