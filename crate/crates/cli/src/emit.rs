//! Result files. Ordering is fixed so that equal inputs give equal bytes.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use serde_json::{json, Value};

use crate::config::ExperimentConfig;
use crate::run::Report;
use crate::Format;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn tabular(cfg: &ExperimentConfig, report: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# petlab {VERSION}");
    let _ = writeln!(out, "# config: {}", serde_json::to_string(cfg).expect("config serializes"));
    for (k, v) in &report.summary {
        let _ = writeln!(out, "# {k}: {}", cell(v));
    }
    out += &report.columns.join(",");
    out.push('\n');
    for row in &report.rows {
        out += &row.iter().map(cell).collect::<Vec<_>>().join(",");
        out.push('\n');
    }
    out
}

pub fn structured(cfg: &ExperimentConfig, report: &Report) -> String {
    let summary: serde_json::Map<String, Value> = report.summary.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
    let doc = json!({
        "version": VERSION,
        "config": cfg,
        "summary": summary,
        "columns": report.columns,
        "rows": report.rows,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
    s.push('\n');
    s
}

/// Writes `<command>.csv` or `<command>.json` into `dir`; returns a short
/// human-readable summary.
pub fn write(dir: &Path, cfg: &ExperimentConfig, report: &Report, format: Format) -> io::Result<String> {
    fs::create_dir_all(dir)?;
    let name = cfg.experiment.name();
    let (file, body) = match format {
        Format::Tabular => (dir.join(format!("{name}.csv")), tabular(cfg, report)),
        Format::Structured => (dir.join(format!("{name}.json")), structured(cfg, report)),
    };
    fs::write(&file, body)?;
    let mut s = format!("{name}: {} rows -> {}\n", report.rows.len(), file.display());
    for (k, v) in &report.summary {
        let _ = writeln!(s, "  {k} = {}", cell(v));
    }
    Ok(s)
}
