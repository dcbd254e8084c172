//! On-disk formats: triple/rule/metapath inputs, the binary graph cache,
//! corpus files, embedding text/binary formats, labeled-pair and
//! prediction CSVs, and baseline model persistence.

pub mod baseline;
pub mod corpus;
pub mod embeddings;
pub mod graph_cache;
pub mod pairs;
pub mod triples;

use std::io::{Read, Write};

use crate::error::CliError;

// Little-endian primitives shared by the binary formats.

pub(crate) fn write_u32<W: Write>(w: &mut W, v: u32) -> std::io::Result<()> {
    w.write_all(&v.to_le_bytes())
}

pub(crate) fn write_u64<W: Write>(w: &mut W, v: u64) -> std::io::Result<()> {
    w.write_all(&v.to_le_bytes())
}

pub(crate) fn write_f64<W: Write>(w: &mut W, v: f64) -> std::io::Result<()> {
    w.write_all(&v.to_le_bytes())
}

pub(crate) fn write_str<W: Write>(w: &mut W, s: &str) -> std::io::Result<()> {
    write_u64(w, s.len() as u64)?;
    w.write_all(s.as_bytes())
}

pub(crate) struct Reader<R: Read> {
    inner: R,
    context: &'static str,
}

impl<R: Read> Reader<R> {
    pub(crate) fn new(inner: R, context: &'static str) -> Self {
        Reader { inner, context }
    }

    fn truncated(&self) -> CliError {
        CliError::Data(format!("{}: truncated file", self.context))
    }

    pub(crate) fn u32(&mut self) -> Result<u32, CliError> {
        let mut buf = [0u8; 4];
        self.inner
            .read_exact(&mut buf)
            .map_err(|_| self.truncated())?;
        Ok(u32::from_le_bytes(buf))
    }

    pub(crate) fn u64(&mut self) -> Result<u64, CliError> {
        let mut buf = [0u8; 8];
        self.inner
            .read_exact(&mut buf)
            .map_err(|_| self.truncated())?;
        Ok(u64::from_le_bytes(buf))
    }

    pub(crate) fn f64(&mut self) -> Result<f64, CliError> {
        Ok(f64::from_le_bytes(self.u64()?.to_le_bytes()))
    }

    pub(crate) fn string(&mut self) -> Result<String, CliError> {
        let len = self.u64()? as usize;
        if len > (1 << 30) {
            return Err(CliError::Data(format!(
                "{}: implausible string length {len}",
                self.context
            )));
        }
        let mut buf = vec![0u8; len];
        self.inner
            .read_exact(&mut buf)
            .map_err(|_| self.truncated())?;
        String::from_utf8(buf)
            .map_err(|_| CliError::Data(format!("{}: invalid UTF-8", self.context)))
    }

    pub(crate) fn magic(&mut self, expected: &[u8; 4]) -> Result<(), CliError> {
        let mut buf = [0u8; 4];
        self.inner
            .read_exact(&mut buf)
            .map_err(|_| self.truncated())?;
        if &buf != expected {
            return Err(CliError::Data(format!(
                "{}: bad magic (not a {} file)",
                self.context, self.context
            )));
        }
        Ok(())
    }

    pub(crate) fn expect_eof(&mut self) -> Result<(), CliError> {
        let mut buf = [0u8; 1];
        match self.inner.read(&mut buf) {
            Ok(0) => Ok(()),
            _ => Err(CliError::Data(format!(
                "{}: trailing bytes after payload",
                self.context
            ))),
        }
    }
}
