use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use o3sim::io;
use serde::Serialize;
use serde_json::Value;

use crate::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Both,
}

impl Format {
    fn json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }

    fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }
}

/// A CSV table ready to be written.
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

fn output_error(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Output(format!("{}: {e}", path.display()))
}

/// Writes `<stem>.json` and/or `<stem>.csv` into `dir` and returns the
/// paths written.
pub fn write<C: Serialize>(
    dir: &Path,
    stem: &str,
    format: Format,
    config: &C,
    document: &Value,
    table: &Table,
) -> Result<Vec<PathBuf>, Failure> {
    fs::create_dir_all(dir).map_err(|e| output_error(dir, e))?;
    let mut written = Vec::new();
    if format.json() {
        let path = dir.join(format!("{stem}.json"));
        let text = io::to_json_string(document)?;
        fs::write(&path, text).map_err(|e| output_error(&path, e))?;
        written.push(path);
    }
    if format.csv() {
        let path = dir.join(format!("{stem}.csv"));
        let file = fs::File::create(&path).map_err(|e| output_error(&path, e))?;
        io::write_csv(std::io::BufWriter::new(file), config, &table.header, table.rows.iter().cloned())
            .map_err(|e| output_error(&path, e))?;
        written.push(path);
    }
    for p in &written {
        println!("wrote {}", p.display());
    }
    Ok(written)
}

pub fn num(x: f64) -> String {
    io::format_number(x)
}
