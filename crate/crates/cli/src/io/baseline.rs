//! Baseline model persistence: versioned text, floats at round-trip
//! precision.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use walkrank_core::logreg::LogRegModel;

use crate::error::{io_err, CliError};

const HEADER: &str = "walkrank-logreg v1";

pub fn save_logreg(model: &LogRegModel, path: &Path) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(file);
    let write = |w: &mut BufWriter<File>| -> std::io::Result<()> {
        writeln!(w, "{HEADER}")?;
        writeln!(w, "dim {}", model.weights.len())?;
        writeln!(w, "iterations {}", model.iterations)?;
        writeln!(w, "final_loss {:.16e}", model.final_loss)?;
        writeln!(w, "bias {:.16e}", model.bias)?;
        for weight in &model.weights {
            writeln!(w, "{weight:.16e}")?;
        }
        w.flush()
    };
    write(&mut w).map_err(|e| io_err(path, e))
}

pub fn load_logreg(path: &Path) -> Result<LogRegModel, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut lines = text.lines();
    let bad = |msg: &str| CliError::Data(format!("{}: {msg}", path.display()));
    if lines.next() != Some(HEADER) {
        return Err(bad("not a walkrank-logreg v1 file"));
    }
    let mut field = |name: &str| -> Result<String, CliError> {
        let line = lines.next().ok_or_else(|| bad("truncated"))?;
        line.strip_prefix(name)
            .and_then(|rest| rest.strip_prefix(' '))
            .map(str::to_string)
            .ok_or_else(|| bad(&format!("expected `{name} ...`")))
    };
    let dim: usize = field("dim")?.parse().map_err(|_| bad("bad dim"))?;
    let iterations: usize = field("iterations")?
        .parse()
        .map_err(|_| bad("bad iterations"))?;
    let final_loss: f64 = field("final_loss")?
        .parse()
        .map_err(|_| bad("bad final_loss"))?;
    let bias: f64 = field("bias")?.parse().map_err(|_| bad("bad bias"))?;
    let mut weights = Vec::with_capacity(dim);
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        weights.push(line.trim().parse::<f64>().map_err(|_| bad("bad weight"))?);
    }
    if weights.len() != dim {
        return Err(bad(&format!(
            "expected {dim} weights, found {}",
            weights.len()
        )));
    }
    Ok(LogRegModel {
        weights,
        bias,
        iterations,
        final_loss,
    })
}
