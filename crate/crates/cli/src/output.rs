use std::path::Path;

use clap::ValueEnum;
use serde::Serialize;

use crate::{OutputArgs, UsageError};

#[derive(Clone, Copy, Debug, Default, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

pub fn json<T: Serialize>(value: &T) -> Result<String, UsageError> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn csv<R: Serialize>(rows: &[R]) -> Result<String, UsageError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| UsageError(e.to_string()))?)?)
}

pub fn write_file(path: &Path, text: &str) -> Result<(), UsageError> {
    std::fs::write(path, text).map_err(|e| UsageError(format!("cannot write {}: {e}", path.display())))
}

/// Writes the report as JSON, or as CSV rows.
pub fn emit<T: Serialize, R: Serialize>(out: &OutputArgs, report: &T, rows: &[R]) -> Result<(), UsageError> {
    let text = match out.format {
        Format::Json => json(report)?,
        Format::Csv => csv(rows)?,
    };
    match &out.out {
        Some(p) => write_file(p, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
