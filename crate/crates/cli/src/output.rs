//! CSV and JSON table output with a provenance header.
//!
//! The CSV starts with a `#`-comment block echoing the fully resolved
//! configuration, then a header row and one data row per scan point. Floats
//! use Rust's shortest round-trip formatting, so re-runs are byte-identical.

use std::io::Write;
use std::path::Path;

use crate::CliError;

pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self { columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Option<f64>>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

fn render_csv(command: &str, echo: &[String], table: &Table) -> String {
    let mut out = String::new();
    out.push_str(&format!("# polsqueeze {command}\n"));
    for line in echo {
        out.push_str(&format!("# {line}\n"));
    }
    out.push_str(&table.columns.join(","));
    out.push('\n');
    for row in &table.rows {
        let cells: Vec<String> = row
            .iter()
            .map(|c| match c {
                Some(v) => format!("{v}"),
                None => String::new(),
            })
            .collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn write_csv(
    dest: Option<&str>,
    command: &str,
    echo: &[String],
    table: &Table,
) -> Result<(), CliError> {
    let text = render_csv(command, echo, table);
    match dest {
        None => {
            std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Io(e.to_string()))?;
        }
        Some(path) => {
            std::fs::write(Path::new(path), text)
                .map_err(|e| CliError::Io(format!("cannot write {path}: {e}")))?;
        }
    }
    Ok(())
}

pub fn write_json(
    path: &str,
    command: &str,
    config: &crate::config::FileConfig,
    table: &Table,
) -> Result<(), CliError> {
    let rows: Vec<Vec<serde_json::Value>> = table
        .rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|c| match c {
                    Some(v) => serde_json::json!(v),
                    None => serde_json::Value::Null,
                })
                .collect()
        })
        .collect();
    let doc = serde_json::json!({
        "command": command,
        "config": config,
        "columns": table.columns,
        "rows": rows,
    });
    let text = serde_json::to_string_pretty(&doc).expect("table serializes");
    std::fs::write(Path::new(path), text)
        .map_err(|e| CliError::Io(format!("cannot write {path}: {e}")))
}
