//! Labeled-pair CSVs, prediction CSVs, and ranking CSVs.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use walkrank_core::eval::{load_labeled_pairs, LabeledPairSet};
use walkrank_core::rank::{RankedList, TopKPredictions};

use crate::error::{io_err, CliError};

pub fn load_labeled_pairs_file(path: &Path) -> Result<LabeledPairSet, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    load_labeled_pairs(text.lines(), &path.display().to_string()).map_err(CliError::from)
}

pub fn write_labeled_pairs(set: &LabeledPairSet, path: &Path) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(file);
    let write = |w: &mut BufWriter<File>| -> std::io::Result<()> {
        writeln!(w, "source,target,label")?;
        for pair in set.pairs() {
            writeln!(w, "{},{},{}", pair.source, pair.target, pair.label)?;
        }
        w.flush()
    };
    write(&mut w).map_err(|e| io_err(path, e))
}

/// `source,target,score,rank,predicted_label` with a header row. Scores
/// print in shortest round-trip form.
pub fn write_predictions(preds: &TopKPredictions, path: &Path) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(file);
    let write = |w: &mut BufWriter<File>| -> std::io::Result<()> {
        writeln!(w, "source,target,score,rank,predicted_label")?;
        for row in &preds.rows {
            writeln!(
                w,
                "{},{},{},{},{}",
                row.source,
                row.target,
                row.score,
                row.rank,
                row.predicted as u8
            )?;
        }
        w.flush()
    };
    write(&mut w).map_err(|e| io_err(path, e))
}

/// Two-column `target,score` ranking, ordered by rank.
pub fn write_ranking(list: &RankedList, path: &Path) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(file);
    let write = |w: &mut BufWriter<File>| -> std::io::Result<()> {
        writeln!(w, "target,score")?;
        for entry in &list.entries {
            writeln!(w, "{},{}", entry.target, entry.score)?;
        }
        w.flush()
    };
    write(&mut w).map_err(|e| io_err(path, e))
}
