//! Table writers. Every table starts with a provenance header: `#` lines
//! for CSV, a `provenance` object for JSON. Nothing time- or host-dependent
//! goes in, so reruns are byte-identical.

use std::io::Write;

use anyhow::{Context, Result};
use serde::Serialize;

use crate::config::{Format, RunConfig};

#[derive(Serialize)]
pub struct Provenance<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub config: &'a RunConfig,
    /// Command-specific options.
    pub options: serde_json::Value,
}

impl<'a> Provenance<'a> {
    pub fn new(command: &'a str, config: &'a RunConfig, options: serde_json::Value) -> Self {
        Self {
            tool: "u1walsh",
            version: env!("CARGO_PKG_VERSION"),
            command,
            config,
            options,
        }
    }

    pub fn lines(&self, prefix: &str) -> Result<String> {
        Ok(format!(
            "{prefix} {} {}\n{prefix} command: {}\n{prefix} config: {}\n{prefix} options: {}\n",
            self.tool,
            self.version,
            self.command,
            serde_json::to_string(self.config)?,
            serde_json::to_string(&self.options)?,
        ))
    }
}

pub fn emit(bytes: &[u8], config: &RunConfig) -> Result<()> {
    match config.out_path() {
        Some(path) => std::fs::write(path, bytes).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            Ok(out.flush()?)
        }
    }
}

/// One table, rows in sweep order.
pub fn render<R: Serialize>(prov: &Provenance, rows: &[R]) -> Result<Vec<u8>> {
    match prov.config.format {
        Format::Csv => {
            let mut buf = prov.lines("#")?.into_bytes();
            let mut w = csv::Writer::from_writer(&mut buf);
            for r in rows {
                w.serialize(r)?;
            }
            w.flush()?;
            drop(w);
            Ok(buf)
        }
        Format::Json => json(prov, rows),
    }
}

/// A JSON document `{"provenance": ..., "rows": ...}`.
pub fn json<T: Serialize + ?Sized>(prov: &Provenance, rows: &T) -> Result<Vec<u8>> {
    #[derive(Serialize)]
    struct Doc<'a, T: ?Sized> {
        provenance: &'a Provenance<'a>,
        rows: &'a T,
    }
    let mut s = serde_json::to_string_pretty(&Doc { provenance: prov, rows })?;
    s.push('\n');
    Ok(s.into_bytes())
}
