//! CSV and JSON files.
//!
//! Every CSV has exactly one header row. Numbers are written with Rust's
//! shortest round-trip formatting, so reading a file back gives the same bits.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use ndarray::{Array1, Array2};
use serde::Serialize;

use crate::CliError;

fn reader(path: &Path) -> Result<csv::Reader<File>, CliError> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn parse_cell(path: &Path, row: usize, col: usize, raw: &str) -> Result<f64, CliError> {
    if raw.is_empty() {
        return Err(CliError::Io(format!("{}: missing value at row {row}, column {col}", path.display())));
    }
    raw.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| CliError::Io(format!("{}: bad number '{raw}' at row {row}, column {col}", path.display())))
}

/// Reads a numeric table with a header row.
pub fn read_matrix(path: &Path) -> Result<Array2<f64>, CliError> {
    let mut rdr = reader(path)?;
    let width = rdr
        .headers()
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?
        .len();
    let mut values = Vec::new();
    let mut rows = 0;
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        if rec.len() != width {
            return Err(CliError::Io(format!("{}: row {} has {} fields, expected {width}", path.display(), i + 1, rec.len())));
        }
        for (j, raw) in rec.iter().enumerate() {
            values.push(parse_cell(path, i + 1, j + 1, raw)?);
        }
        rows += 1;
    }
    if rows == 0 {
        return Err(CliError::Io(format!("{}: no data rows", path.display())));
    }
    Array2::from_shape_vec((rows, width), values).map_err(|e| CliError::Io(e.to_string()))
}

/// Reads a single-column table.
pub fn read_vector(path: &Path) -> Result<Array1<f64>, CliError> {
    let m = read_matrix(path)?;
    if m.ncols() != 1 {
        return Err(CliError::Io(format!("{}: expected one column, found {}", path.display(), m.ncols())));
    }
    Ok(m.column(0).to_owned())
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |e| CliError::Io(format!("{}: {e}", path.display()))
}

/// Writes a header line followed by pre-formatted rows.
pub fn write_lines<I, S>(path: &Path, header: &str, rows: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut w = create(path)?;
    writeln!(w, "{header}").map_err(io_err(path))?;
    for row in rows {
        writeln!(w, "{}", row.as_ref()).map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

pub fn write_matrix(path: &Path, prefix: &str, m: &Array2<f64>) -> Result<(), CliError> {
    let header: Vec<String> = (1..=m.ncols()).map(|j| format!("{prefix}{j}")).collect();
    write_lines(
        path,
        &header.join(","),
        m.rows().into_iter().map(|r| join(r.iter())),
    )
}

pub fn write_vector(path: &Path, name: &str, v: &Array1<f64>) -> Result<(), CliError> {
    write_lines(path, name, v.iter().map(|x| x.to_string()))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    writeln!(w).map_err(io_err(path))?;
    w.flush().map_err(io_err(path))
}

pub fn join<'a>(values: impl Iterator<Item = &'a f64>) -> String {
    values.map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}
