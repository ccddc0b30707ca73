//! Point clouds as headerless CSV: one point per row, one coordinate per column.

use std::io::{Read, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use perforate_core::prelude::PointCloud;

pub fn read_cloud(path: &Path) -> Result<PointCloud> {
    let file = std::fs::File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    parse_cloud(file).with_context(|| format!("while reading {}", path.display()))
}

/// A first row that is not numeric is taken as a header and skipped.
pub fn parse_cloud(input: impl Read) -> Result<PointCloud> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(input);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        let parsed: Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(row) => rows.push(row),
            Err(_) if line == 0 => continue,
            Err(e) => bail!("row {}: {e}", line + 1),
        }
    }
    if rows.is_empty() {
        bail!("no points");
    }
    Ok(PointCloud::from_points(&rows)?)
}

pub fn write_cloud(path: &Path, cloud: &PointCloud) -> Result<()> {
    let mut writer = csv::Writer::from_path(path).with_context(|| format!("cannot create {}", path.display()))?;
    for p in cloud.points() {
        writer.write_record(p.iter().map(f64::to_string))?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_text(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}
