use std::io::Read;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Element ids and numeric rows of a CSV table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub ids: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// Reads a CSV with a header row, an id in the first column and numeric
/// values in the rest. Every row must have as many cells as the header.
pub fn read_table<R: Read>(input: R) -> Result<Table> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let width = reader.headers().map_err(|e| csv_error(&e, 1))?.len();
    if width < 2 {
        return Err(Error::Parse {
            line: 1,
            message: "need an id column and at least one value column".into(),
        });
    }
    let mut table = Table {
        ids: Vec::new(),
        rows: Vec::new(),
    };
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(&e, 0))?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != width {
            return Err(Error::Parse {
                line,
                message: format!("expected {width} cells, found {}", record.len()),
            });
        }
        let row = record
            .iter()
            .skip(1)
            .map(|cell| {
                cell.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::Parse {
                        line,
                        message: format!("`{cell}` is not a finite number"),
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        table.ids.push(record[0].to_string());
        table.rows.push(row);
    }
    if table.rows.is_empty() {
        return Err(Error::Parse {
            line: 1,
            message: "no data rows".into(),
        });
    }
    Ok(table)
}

fn csv_error(e: &csv::Error, fallback: usize) -> Error {
    Error::Parse {
        line: e.position().map_or(fallback, |p| p.line() as usize),
        message: e.to_string(),
    }
}

/// Subtracts the per-coordinate mean, then scales each vector to unit norm;
/// vectors that end up at zero stay at zero.
pub fn normalize(vectors: &mut [Vec<f64>]) {
    let Some(dim) = vectors.first().map(Vec::len) else {
        return;
    };
    let count = vectors.len() as f64;
    let mean: Vec<f64> = (0..dim)
        .map(|c| vectors.iter().map(|v| v[c]).sum::<f64>() / count)
        .collect();
    for v in vectors.iter_mut() {
        v.iter_mut().zip(&mean).for_each(|(x, m)| *x -= m);
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            v.iter_mut().for_each(|x| *x /= norm);
        }
    }
}

/// Normalized per-element feature vectors from a CSV file.
pub fn load_features(path: &Path) -> Result<Vec<Vec<f64>>> {
    let mut table = read_table(std::fs::File::open(path)?)?;
    normalize(&mut table.rows);
    Ok(table.rows)
}

/// Empirical correlation between rows (each row a series of observations),
/// with `jitter` added to the diagonal.
pub fn correlation(rows: &[Vec<f64>], jitter: f64) -> DMatrix<f64> {
    let centered: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| {
            let mean = r.iter().sum::<f64>() / r.len() as f64;
            let c: Vec<f64> = r.iter().map(|x| x - mean).collect();
            let norm = c.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 0.0 {
                c.iter().map(|x| x / norm).collect()
            } else {
                c
            }
        })
        .collect();
    let n = rows.len();
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            1.0 + jitter
        } else {
            centered[i].iter().zip(&centered[j]).map(|(a, b)| a * b).sum()
        }
    })
}
