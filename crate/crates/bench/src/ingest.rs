//! CSV ingestion.

use std::path::Path;

use rankaccess_core::Dataset;

use crate::error::{usage, BenchError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Normalization {
    #[default]
    None,
    /// Per column to `[0, 1]`; a constant column becomes all zeros.
    MinMax,
    /// Per column to mean 0 and population standard deviation 1; a constant
    /// column becomes all zeros.
    ZScore,
}

impl std::str::FromStr for Normalization {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Normalization::None),
            "minmax" => Ok(Normalization::MinMax),
            "zscore" => Ok(Normalization::ZScore),
            other => Err(usage(format!(
                "unknown normalization {other:?} (expected none, minmax or zscore)"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Loaded {
    pub data: Dataset,
    /// Rows skipped for a missing or non-numeric selected value.
    pub dropped: usize,
}

/// Reads the named columns of a headed CSV file, in the given order. An
/// empty column list selects every column.
pub fn load_csv(path: &Path, columns: &[String], normalization: Normalization) -> Result<Loaded> {
    let file = std::fs::File::open(path).map_err(|e| BenchError::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_reader(file);
    let headers = reader.headers()?.clone();
    let index: Vec<usize> = if columns.is_empty() {
        (0..headers.len()).collect()
    } else {
        columns
            .iter()
            .map(|c| {
                headers
                    .iter()
                    .position(|h| h.trim() == c)
                    .ok_or_else(|| usage(format!("no column named {c:?} in {}", path.display())))
            })
            .collect::<Result<_>>()?
    };
    let d = index.len();
    if d == 0 {
        return Err(usage(format!("{} has no columns", path.display())));
    }

    let mut coords = Vec::new();
    let mut dropped = 0;
    let mut row = Vec::with_capacity(d);
    for record in reader.records() {
        let record = match record {
            Ok(r) => r,
            Err(_) => {
                dropped += 1;
                continue;
            }
        };
        row.clear();
        for &j in &index {
            match record.get(j).map(str::trim).and_then(|v| v.parse::<f64>().ok()) {
                Some(x) if x.is_finite() => row.push(x),
                _ => break,
            }
        }
        if row.len() == d {
            coords.extend_from_slice(&row);
        } else {
            dropped += 1;
        }
    }
    if coords.is_empty() {
        return Err(usage(format!("{} has no fully numeric rows", path.display())));
    }
    normalize_columns(&mut coords, d, normalization);
    Ok(Loaded {
        data: Dataset::new(d, coords)?,
        dropped,
    })
}

fn normalize_columns(coords: &mut [f64], d: usize, how: Normalization) {
    let n = coords.len() / d;
    for j in 0..d {
        let column = || coords.iter().skip(j).step_by(d);
        let (shift, scale) = match how {
            Normalization::None => continue,
            Normalization::MinMax => {
                let lo = column().copied().fold(f64::INFINITY, f64::min);
                let hi = column().copied().fold(f64::NEG_INFINITY, f64::max);
                (lo, hi - lo)
            }
            Normalization::ZScore => {
                let mean = column().sum::<f64>() / n as f64;
                let var = column().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
                (mean, var.sqrt())
            }
        };
        for x in coords.iter_mut().skip(j).step_by(d) {
            *x = if scale > 0.0 { (*x - shift) / scale } else { 0.0 };
        }
    }
}

/// Writes `data` as CSV with headers `x0, x1, ...`.
pub fn write_csv(path: &Path, data: &Dataset) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record((0..data.dim()).map(|j| format!("x{j}")))?;
    for p in data.points() {
        w.write_record(p.coords.iter().map(|x| x.to_string()))?;
    }
    w.flush().map_err(|e| BenchError::io(path, e))
}
