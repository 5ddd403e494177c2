//! Reading samples from disk.

use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use crate::distributions::SortedSample;
use crate::error::{Error, Result};
use crate::montecarlo::csv_to_io;

/// Parses one real per line. Blank lines and lines starting with `#` are skipped.
pub fn read_sample<R: BufRead>(reader: R) -> Result<SortedSample<f64>> {
    let mut values = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let cell = line.trim();
        if cell.is_empty() || cell.starts_with('#') {
            continue;
        }
        let v: f64 = cell.parse().map_err(|_| Error::Parse {
            row: i + 1,
            message: format!("not a number: {cell:?}"),
        })?;
        if !v.is_finite() {
            return Err(Error::Parse {
                row: i + 1,
                message: format!("non-finite value {cell:?}"),
            });
        }
        values.push(v);
    }
    SortedSample::from_raw(values)
}

pub fn load_sample(path: impl AsRef<Path>) -> Result<SortedSample<f64>> {
    read_sample(BufReader::new(File::open(path)?))
}

/// Reads the named column of a headed CSV. Rows whose cell is blank are skipped.
pub fn read_sample_column<R: Read>(reader: R, column: &str) -> Result<SortedSample<f64>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(csv_to_io)?.clone();
    let idx = headers
        .iter()
        .position(|h| h == column)
        .ok_or_else(|| Error::MissingColumn(column.to_string()))?;
    let mut values = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 2;
        let rec = rec.map_err(|e| Error::Parse {
            row,
            message: e.to_string(),
        })?;
        let cell = rec.get(idx).unwrap_or("");
        if cell.is_empty() {
            continue;
        }
        let v: f64 = cell.parse().map_err(|_| Error::Parse {
            row,
            message: format!("not a number: {cell:?}"),
        })?;
        if !v.is_finite() {
            return Err(Error::Parse {
                row,
                message: format!("non-finite value {cell:?}"),
            });
        }
        values.push(v);
    }
    SortedSample::from_raw(values)
}

pub fn load_sample_column(path: impl AsRef<Path>, column: &str) -> Result<SortedSample<f64>> {
    read_sample_column(File::open(path)?, column)
}
