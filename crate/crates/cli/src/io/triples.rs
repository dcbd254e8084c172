//! Text inputs: triple files, type-rule files, and metapath files.

use std::path::Path;

use walkrank_core::graph::{ingest_triples, HeteroGraph, TypeRegistry, TypeRule, TypeRuleSet};
use walkrank_core::walk::Metapath;

use crate::error::{io_err, CliError};

/// TSV of `pattern<TAB>typename`; `#` comments and blank lines ignored.
pub fn load_type_rules(path: &Path) -> Result<TypeRuleSet, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut rules = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut fields = trimmed.split('\t');
        let (pattern, type_name) = match (fields.next(), fields.next(), fields.next()) {
            (Some(p), Some(t), None) if !p.trim().is_empty() && !t.trim().is_empty() => {
                (p.trim(), t.trim())
            }
            _ => {
                return Err(CliError::data(format!(
                    "{}:{}: expected `pattern<TAB>typename`",
                    path.display(),
                    i + 1
                )))
            }
        };
        rules.push(TypeRule {
            pattern: pattern.to_string(),
            type_name: type_name.to_string(),
        });
    }
    Ok(TypeRuleSet::new(rules))
}

/// One node-type name per line; `#` comments and blank lines ignored.
pub fn load_metapath(path: &Path, registry: &TypeRegistry) -> Result<Metapath, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let names: Vec<&str> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .collect();
    Metapath::from_names(registry, &names).map_err(CliError::from)
}

/// Reads the triples file (and optional rule file) and builds the graph.
pub fn read_graph(triples: &Path, type_rules: Option<&Path>) -> Result<HeteroGraph, CliError> {
    let rules = match type_rules {
        Some(path) => load_type_rules(path)?,
        None => TypeRuleSet::empty(),
    };
    let text = std::fs::read_to_string(triples).map_err(|e| io_err(triples, e))?;
    ingest_triples(text.lines(), rules).map_err(CliError::from)
}
