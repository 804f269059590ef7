//! Tabular output with an embedded run manifest, as CSV or JSON.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use chrono::{SecondsFormat, Utc};
use clap::ValueEnum;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::config::ConfigFile;
use crate::error::CliResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Everything needed to reproduce an output file with the same binary.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub config_echo: Value,
    pub tool_version: String,
    pub seed: u64,
    pub timestamp: String,
}

impl RunManifest {
    pub fn new(subcommand: &str, config: &ConfigFile, extra: &[(&str, Value)]) -> CliResult<Self> {
        let mut echo = serde_json::to_value(config)?;
        if let Value::Object(map) = &mut echo {
            for (k, v) in extra {
                map.insert((*k).to_string(), v.clone());
            }
        }
        Ok(Self {
            subcommand: subcommand.to_string(),
            seed: config.seed.unwrap_or_default(),
            config_echo: echo,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: Utc::now().to_rfc3339_opts(SecondsFormat::Secs, true),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            // `{}` on f64 prints the shortest string that parses back exactly
            Cell::Num(v) => format!("{v}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => {
                format!("\"{}\"", s.replace('"', "\"\""))
            }
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Int(v) => Value::from(*v),
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Empty => Value::Null,
        }
    }
}

/// Rows under a fixed header, plus free-form notes emitted as `#` lines.
#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub notes: Vec<String>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn write_csv<W: Write>(&self, manifest: &RunManifest, mut out: W) -> CliResult<()> {
        writeln!(out, "# subcommand: {}", manifest.subcommand)?;
        writeln!(out, "# tool_version: {}", manifest.tool_version)?;
        writeln!(out, "# seed: {}", manifest.seed)?;
        writeln!(out, "# timestamp: {}", manifest.timestamp)?;
        writeln!(
            out,
            "# config: {}",
            serde_json::to_string(&manifest.config_echo)?
        )?;
        for note in &self.notes {
            writeln!(out, "# {note}")?;
        }
        writeln!(out, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Cell::csv).collect();
            writeln!(out, "{}", line.join(","))?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_json(&self, manifest: &RunManifest) -> CliResult<Value> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| ((*c).to_string(), v.json()))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let mut top = Map::new();
        top.insert("manifest".into(), serde_json::to_value(manifest)?);
        top.insert("columns".into(), Value::from(self.columns.clone()));
        if !self.notes.is_empty() {
            top.insert("notes".into(), Value::from(self.notes.clone()));
        }
        top.insert("rows".into(), Value::Array(rows));
        Ok(Value::Object(top))
    }

    pub fn write<W: Write>(
        &self,
        manifest: &RunManifest,
        format: Format,
        mut out: W,
    ) -> CliResult<()> {
        match format {
            Format::Csv => self.write_csv(manifest, out),
            Format::Json => {
                serde_json::to_writer_pretty(&mut out, &self.to_json(manifest)?)?;
                writeln!(out)?;
                out.flush()?;
                Ok(())
            }
        }
    }
}

/// Writer for `path`, or stdout when absent.
pub fn open_output(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}
