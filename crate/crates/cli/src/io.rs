//! CSV ingestion/serialization and atomic file writes.
//!
//! The matrix CSV layout: first row holds column names, first column holds
//! sample ids, every other cell is a non-negative finite number. Floats are
//! written with Rust's shortest round-trip formatting so files diff cleanly
//! and reload to bit-identical values.

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use pnmf_core::DenseMatrix;

/// A matrix plus its row ids and column names.
pub struct LabeledMatrix {
    pub matrix: DenseMatrix,
    pub row_ids: Vec<String>,
    pub col_names: Vec<String>,
}

/// Reads a labeled matrix, reporting the file line and column name of the
/// first offending cell on failure.
pub fn load_csv(path: &Path) -> Result<LabeledMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("cannot open {}", path.display()))?;

    let headers = reader
        .headers()
        .with_context(|| format!("cannot read header of {}", path.display()))?;
    if headers.len() < 2 {
        bail!(
            "{}: expected a sample-id column plus at least one data column",
            path.display()
        );
    }
    let col_names: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();

    let mut row_ids = Vec::new();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (index, record) in reader.records().enumerate() {
        let line = index + 2; // 1-based, after the header line
        let record = record.with_context(|| format!("{}: line {line}", path.display()))?;
        let mut cells = record.iter();
        let id = cells
            .next()
            .map(str::to_string)
            .unwrap_or_default();
        let mut row = Vec::with_capacity(col_names.len());
        for (j, cell) in cells.enumerate() {
            let value: f64 = cell.parse().with_context(|| {
                format!(
                    "{}: line {line}, column '{}': not a number: '{cell}'",
                    path.display(),
                    col_names[j]
                )
            })?;
            if !value.is_finite() {
                bail!(
                    "{}: line {line}, column '{}': non-finite value {value}",
                    path.display(),
                    col_names[j]
                );
            }
            if value < 0.0 {
                bail!(
                    "{}: line {line}, column '{}': negative value {value}",
                    path.display(),
                    col_names[j]
                );
            }
            row.push(value);
        }
        row_ids.push(id);
        rows.push(row);
    }

    if rows.is_empty() {
        bail!("{}: no data rows", path.display());
    }
    let matrix = DenseMatrix::from_rows(&rows)
        .with_context(|| format!("{}: invalid matrix", path.display()))?;
    Ok(LabeledMatrix {
        matrix,
        row_ids,
        col_names,
    })
}

/// Writes a labeled matrix atomically.
pub fn save_csv(
    path: &Path,
    matrix: &DenseMatrix,
    id_header: &str,
    row_ids: &[String],
    col_names: &[String],
) -> Result<()> {
    debug_assert_eq!(row_ids.len(), matrix.rows());
    debug_assert_eq!(col_names.len(), matrix.cols());
    let mut buffer = Vec::new();
    {
        let mut writer = csv::Writer::from_writer(&mut buffer);
        let mut header = vec![id_header.to_string()];
        header.extend(col_names.iter().cloned());
        writer.write_record(&header)?;
        for (i, id) in row_ids.iter().enumerate() {
            let mut record = vec![id.clone()];
            for j in 0..matrix.cols() {
                record.push(format!("{}", matrix.get(i, j)));
            }
            writer.write_record(&record)?;
        }
        writer.flush()?;
    }
    write_atomic(path, &buffer)
}

/// Writes `bytes` to a temporary file in the target directory, then renames
/// it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or_else(|| Path::new("."));
    fs::create_dir_all(dir)
        .with_context(|| format!("cannot create directory {}", dir.display()))?;
    let mut temp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("cannot create temporary file in {}", dir.display()))?;
    temp.write_all(bytes)?;
    temp.flush()?;
    temp.persist(path)
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

/// Sequentially numbered labels: `s0, s1, ...`.
pub fn numbered(prefix: &str, count: usize) -> Vec<String> {
    (0..count).map(|i| format!("{prefix}{i}")).collect()
}
