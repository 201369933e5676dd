//! Report destinations and encodings.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::ValueEnum;
use serde::Serialize;

/// Default output directory when `--out` is absent.
pub const OUT_DIR_ENV: &str = "MZC_OUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

pub struct Sink {
    pub path: Option<PathBuf>,
    pub format: Format,
}

impl Sink {
    /// `--out` wins; otherwise `$MZC_OUT_DIR/<command>.<ext>`; otherwise stdout.
    pub fn resolve(out: Option<PathBuf>, format: Format, command: &str) -> Sink {
        let path = out.or_else(|| {
            std::env::var_os(OUT_DIR_ENV)
                .filter(|d| !d.is_empty())
                .map(|d| PathBuf::from(d).join(format!("{command}.{}", format.extension())))
        });
        Sink { path, format }
    }

    pub fn write_bytes(&self, bytes: &[u8]) -> Result<()> {
        match &self.path {
            Some(p) => {
                if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
                }
                fs::write(p, bytes).with_context(|| format!("writing {}", p.display()))?;
                eprintln!("wrote {}", p.display());
                Ok(())
            }
            None => io::stdout().write_all(bytes).context("writing stdout"),
        }
    }

    pub fn json<T: Serialize>(&self, value: &T) -> Result<()> {
        let mut s = serde_json::to_string_pretty(value)?;
        s.push('\n');
        self.write_bytes(s.as_bytes())
    }

    pub fn csv(&self, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header)?;
        for r in rows {
            w.write_record(&r)?;
        }
        self.write_bytes(&w.into_inner().context("flushing csv")?)
    }

    /// Writes `value` as JSON, or `rows` as CSV.
    pub fn emit<T: Serialize>(&self, value: &T, header: &[&str], rows: impl FnOnce() -> Vec<Vec<String>>) -> Result<()> {
        match self.format {
            Format::Json => self.json(value),
            Format::Csv => self.csv(header, rows()),
        }
    }
}
