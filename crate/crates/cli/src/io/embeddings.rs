//! Embedding persistence.
//!
//! Text format: first line `N D`, then `uri v1 ... vD` per row with floats
//! at 17 significant digits (exact f64 round-trip). Binary format: the
//! source of truth; versioned header, label table, raw little-endian f64
//! matrices, context vectors optional.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use walkrank_core::train::EmbeddingMatrix;

use super::{write_f64, write_str, write_u32, write_u64, Reader};
use crate::error::{io_err, CliError};

const MAGIC: &[u8; 4] = b"WKEM";
const VERSION: u32 = 1;
const FLAG_CONTEXT: u64 = 1;

pub fn write_embeddings_text(model: &EmbeddingMatrix, path: &Path) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(file);
    let write = |w: &mut BufWriter<File>| -> std::io::Result<()> {
        writeln!(w, "{} {}", model.rows(), model.dim())?;
        for (row, label) in model.labels().iter().enumerate() {
            w.write_all(label.as_bytes())?;
            for &v in model.center_row(row as u32).unwrap() {
                // 17 significant digits: enough to reproduce any f64 exactly.
                write!(w, " {v:.16e}")?;
            }
            w.write_all(b"\n")?;
        }
        w.flush()
    };
    write(&mut w).map_err(|e| io_err(path, e))
}

pub fn read_embeddings_text(path: &Path) -> Result<EmbeddingMatrix, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| CliError::data(format!("{}: empty file", path.display())))?;
    let mut parts = header.split_whitespace();
    let bad_header = || CliError::data(format!("{}: expected header `N D`", path.display()));
    let rows: usize = parts
        .next()
        .and_then(|v| v.parse().ok())
        .ok_or_else(bad_header)?;
    let dim: usize = parts
        .next()
        .and_then(|v| v.parse().ok())
        .ok_or_else(bad_header)?;
    if parts.next().is_some() {
        return Err(bad_header());
    }

    let mut labels = Vec::with_capacity(rows);
    let mut center = Vec::with_capacity(rows * dim);
    for (i, line) in lines {
        let trimmed = line.trim_end();
        if trimmed.is_empty() {
            continue;
        }
        let mut fields = trimmed.split(' ');
        let label = fields.next().unwrap_or_default();
        if label.is_empty() {
            return Err(CliError::data(format!(
                "{}:{}: missing label",
                path.display(),
                i + 1
            )));
        }
        labels.push(label.to_string());
        let before = center.len();
        for field in fields {
            let v: f64 = field.parse().map_err(|_| {
                CliError::data(format!(
                    "{}:{}: bad float `{field}`",
                    path.display(),
                    i + 1
                ))
            })?;
            center.push(v);
        }
        if center.len() - before != dim {
            return Err(CliError::data(format!(
                "{}:{}: expected {dim} values, got {}",
                path.display(),
                i + 1,
                center.len() - before
            )));
        }
    }
    if labels.len() != rows {
        return Err(CliError::data(format!(
            "{}: header promised {rows} rows, found {}",
            path.display(),
            labels.len()
        )));
    }
    EmbeddingMatrix::from_parts(labels, dim, center, None).map_err(CliError::from)
}

pub fn write_embeddings_bin(
    model: &EmbeddingMatrix,
    path: &Path,
    include_context: bool,
) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(file);
    let write = |w: &mut BufWriter<File>| -> std::io::Result<()> {
        w.write_all(MAGIC)?;
        write_u32(w, VERSION)?;
        write_u64(w, model.dim() as u64)?;
        write_u64(w, model.rows() as u64)?;
        write_u64(w, if include_context { FLAG_CONTEXT } else { 0 })?;
        for label in model.labels() {
            write_str(w, label)?;
        }
        for &v in model.center_data() {
            write_f64(w, v)?;
        }
        if include_context {
            for &v in model.context_data() {
                write_f64(w, v)?;
            }
        }
        w.flush()
    };
    write(&mut w).map_err(|e| io_err(path, e))
}

/// Loads the binary format, rejecting version mismatches and, when
/// `expect_dim` is given, dimension mismatches.
pub fn read_embeddings_bin(
    path: &Path,
    expect_dim: Option<usize>,
) -> Result<EmbeddingMatrix, CliError> {
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    let mut r = Reader::new(BufReader::new(file), "embedding file");
    r.magic(MAGIC)?;
    let version = r.u32()?;
    if version != VERSION {
        return Err(CliError::Data(format!(
            "embedding file version mismatch: file has {version}, expected {VERSION}"
        )));
    }
    let dim = r.u64()? as usize;
    if let Some(expected) = expect_dim {
        if dim != expected {
            return Err(CliError::Data(format!(
                "embedding dimension mismatch: file has {dim}, expected {expected}"
            )));
        }
    }
    let rows = r.u64()? as usize;
    let flags = r.u64()?;
    let mut labels = Vec::with_capacity(rows);
    for _ in 0..rows {
        labels.push(r.string()?);
    }
    let mut center = Vec::with_capacity(rows * dim);
    for _ in 0..rows * dim {
        center.push(r.f64()?);
    }
    let context = if flags & FLAG_CONTEXT != 0 {
        let mut c = Vec::with_capacity(rows * dim);
        for _ in 0..rows * dim {
            c.push(r.f64()?);
        }
        Some(c)
    } else {
        None
    };
    r.expect_eof()?;
    EmbeddingMatrix::from_parts(labels, dim, center, context).map_err(CliError::from)
}
