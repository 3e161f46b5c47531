//! Deterministic JSON and CSV writers. Nothing time- or host-dependent is
//! ever written.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, ValueEnum};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Clone, Debug)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write to this file instead of standard output.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
pub struct Meta {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub source: String,
    pub params: BTreeMap<&'static str, String>,
}

impl Meta {
    pub fn new(command: &'static str, source: String) -> Self {
        Meta {
            tool: "numcarry",
            version: env!("CARGO_PKG_VERSION"),
            command,
            source,
            params: BTreeMap::new(),
        }
    }

    pub fn param(mut self, key: &'static str, value: impl ToString) -> Self {
        self.params.insert(key, value.to_string());
        self
    }
}

/// Plot-ready rows; `header` names the columns.
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Table {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.header.len());
        self.rows.push(cells);
    }
}

#[derive(Serialize)]
struct Report<'a, T: Serialize> {
    meta: &'a Meta,
    data: &'a T,
}

fn sink(out: &OutputArgs) -> Result<Box<dyn Write>> {
    Ok(match &out.out {
        Some(p) => {
            Box::new(File::create(p).with_context(|| format!("cannot write {}", p.display()))?)
        }
        None => Box::new(io::stdout().lock()),
    })
}

/// JSON: `{"meta": ..., "data": ...}`. CSV: metadata as leading `#` lines,
/// then the table.
pub fn emit<T: Serialize>(out: &OutputArgs, meta: &Meta, data: &T, table: &Table) -> Result<()> {
    let mut w = sink(out)?;
    match out.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut w, &Report { meta, data })?;
            writeln!(w)?;
        }
        Format::Csv => {
            writeln!(w, "# tool: {} {}", meta.tool, meta.version)?;
            writeln!(w, "# command: {}", meta.command)?;
            writeln!(w, "# source: {}", meta.source)?;
            for (k, v) in &meta.params {
                writeln!(w, "# {k}: {v}")?;
            }
            let mut csv = csv::Writer::from_writer(&mut w);
            csv.write_record(&table.header)?;
            for r in &table.rows {
                csv.write_record(r)?;
            }
            csv.flush()?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn opt<T: ToString>(x: &Option<T>) -> String {
    x.as_ref().map(ToString::to_string).unwrap_or_default()
}
