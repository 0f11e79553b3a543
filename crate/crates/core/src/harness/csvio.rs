use std::fs::OpenOptions;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Fixed float formatting: 17 significant digits in scientific notation.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// A row type with a fixed header.
pub trait CsvRow: Sized {
    const HEADER: &'static [&'static str];
    fn to_record(&self) -> Vec<String>;
    fn from_record(record: &csv::StringRecord) -> Result<Self>;
}

pub(crate) fn parse_field<T: std::str::FromStr>(record: &csv::StringRecord, i: usize) -> Result<T> {
    record
        .get(i)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::Parse(format!("bad field {i} in row {:?}", record.position().map(|p| p.line()))))
}

/// Rows already present in `path`; a missing file gives no rows. Reading
/// stops at the first incomplete row, and a final line without its newline
/// counts as incomplete.
pub fn read_rows<R: CsvRow>(path: &Path) -> Result<Vec<R>> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let mut text = std::fs::read_to_string(path)?;
    text.truncate(text.rfind('\n').map_or(0, |i| i + 1));
    if text.is_empty() {
        return Ok(Vec::new());
    }
    let mut reader = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(text.as_bytes());
    let header = reader.headers()?.clone();
    if header.iter().ne(R::HEADER.iter().copied()) {
        return Err(Error::Parse(format!("{} has header {:?}, expected {:?}", path.display(), header, R::HEADER)));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let Ok(record) = record else { break };
        if record.len() != R::HEADER.len() {
            break;
        }
        match R::from_record(&record) {
            Ok(r) => rows.push(r),
            Err(_) => break,
        }
    }
    Ok(rows)
}

/// Overwrite `path` with the header and `rows`.
pub fn write_rows<R: CsvRow>(path: &Path, rows: &[R]) -> Result<()> {
    let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(path)?;
    writer.write_record(R::HEADER)?;
    for r in rows {
        writer.write_record(r.to_record())?;
    }
    writer.flush()?;
    Ok(())
}

/// Produce rows `0..total`, keeping any already in `path` and appending
/// the rest in index order. Work is done in parallel batches; each batch is
/// flushed before the next starts, so an interrupted run resumes cleanly.
pub fn run_resumable<R, F>(path: &Path, total: usize, compute: F) -> Result<Vec<R>>
where
    R: CsvRow + Send,
    F: Fn(usize) -> Result<R> + Sync,
{
    let mut rows: Vec<R> = read_rows(path)?;
    rows.truncate(total);
    // Rewrite so that a torn trailing line is dropped.
    write_rows(path, &rows)?;
    let batch = 4 * rayon::current_num_threads().max(1);
    while rows.len() < total {
        let start = rows.len();
        let end = (start + batch).min(total);
        let fresh: Vec<R> = (start..end).into_par_iter().map(&compute).collect::<Result<_>>()?;
        let file = OpenOptions::new().append(true).open(path)?;
        let mut writer = csv::WriterBuilder::new()
            .has_headers(false)
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(file);
        for r in &fresh {
            writer.write_record(r.to_record())?;
        }
        writer.flush()?;
        rows.extend(fresh);
    }
    Ok(rows)
}
