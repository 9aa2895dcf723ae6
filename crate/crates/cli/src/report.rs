//! Reports: metadata plus a list of flat records, written as JSON or CSV.
//!
//! Record keys keep their insertion order, which fixes the CSV column order.

use std::io::Write;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

pub const TOOL: &str = "frac-spectra";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorInfo {
    pub kind: String,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// Echo of the effective parameters.
    pub config: Map<String, Value>,
    /// `ok` or `error`.
    pub status: String,
    pub error: Option<ErrorInfo>,
    /// Command-specific scalars such as `n_star`.
    pub summary: Map<String, Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub metadata: Metadata,
    pub records: Vec<Map<String, Value>>,
}

impl Report {
    pub fn new(command: &str, config: Map<String, Value>) -> Self {
        Report {
            metadata: Metadata {
                tool: TOOL.into(),
                version: env!("CARGO_PKG_VERSION").into(),
                command: command.into(),
                config,
                status: "ok".into(),
                error: None,
                summary: Map::new(),
            },
            records: vec![],
        }
    }

    pub fn fail(&mut self, kind: &str, message: String) {
        self.metadata.status = "error".into();
        self.metadata.error = Some(ErrorInfo {
            kind: kind.into(),
            message,
        });
    }

    pub fn emit(&self, format: Format, out: &mut dyn Write) -> std::io::Result<()> {
        match format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut *out, self)?;
                writeln!(out)
            }
            Format::Csv => self.write_csv(out),
        }
    }

    /// Header plus one row per record. A failed run yields the columns
    /// `error_kind,message`.
    fn write_csv(&self, out: &mut dyn Write) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        if let Some(e) = &self.metadata.error {
            w.write_record(["error_kind", "message"])?;
            w.write_record([e.kind.as_str(), e.message.as_str()])?;
            return w.flush();
        }
        let Some(first) = self.records.first() else {
            return w.flush();
        };
        w.write_record(first.keys())?;
        for r in &self.records {
            w.write_record(r.values().map(cell))?;
        }
        w.flush()
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Builds a record from `(key, value)` pairs in order.
#[macro_export]
macro_rules! record {
    ($($k:expr => $v:expr),* $(,)?) => {{
        let mut m = serde_json::Map::new();
        $(m.insert($k.to_string(), serde_json::json!($v));)*
        m
    }};
}
