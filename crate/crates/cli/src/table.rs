//! RFC-4180 CSV output. Floats carry 17 significant digits so that the file
//! reproduces the computed values exactly.

use std::io::Write;
use std::path::Path;

use anyhow::Context;

use crate::error::{Classify, Result};

#[derive(Debug, Clone, Default)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> anyhow::Result<Vec<u8>> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::CRLF)
            .from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        Ok(w.into_inner().map_err(|e| e.into_error())?)
    }

    /// Writes to `out`, or to stdout when `None`.
    pub fn write(&self, out: Option<&Path>) -> Result<()> {
        let bytes = self.to_csv().config()?;
        match out {
            Some(path) => std::fs::write(path, bytes)
                .with_context(|| format!("writing {}", path.display()))
                .config(),
            None => std::io::stdout()
                .lock()
                .write_all(&bytes)
                .context("writing stdout")
                .config(),
        }
    }
}

pub fn float(x: f64) -> String {
    // Adding 0.0 turns -0.0 into 0.0.
    format!("{:.16e}", x + 0.0)
}

pub fn opt_float(x: Option<f64>) -> String {
    x.map(float).unwrap_or_default()
}

pub fn int(x: usize) -> String {
    x.to_string()
}

pub fn flag(b: bool) -> String {
    (b as u8).to_string()
}
