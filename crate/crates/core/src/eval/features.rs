use std::io::Read;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `N × d` real feature matrix, row-major. Only the evaluation harness uses features.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix<T> {
    n: usize,
    d: usize,
    data: Vec<T>,
}

impl<T: Scalar> FeatureMatrix<T> {
    pub fn new(n: usize, d: usize, data: Vec<T>) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooFewObjects { min: 2, found: n });
        }
        if d == 0 {
            return Err(Error::InvalidParameter(
                "feature dimension must be at least 1".into(),
            ));
        }
        if data.len() != n * d {
            return Err(Error::DimensionMismatch(format!(
                "expected {} values for {n} rows of {d} features, got {}",
                n * d,
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("features must be finite".into()));
        }
        Ok(Self { n, d, data })
    }

    pub fn from_rows<R: AsRef<[T]>>(rows: &[R]) -> Result<Self> {
        let d = rows.first().ok_or(Error::EmptyInput)?.as_ref().len();
        let mut data = Vec::with_capacity(rows.len() * d);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != d {
                return Err(Error::RaggedRow {
                    row: i,
                    expected: d,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::new(rows.len(), d, data)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.d..(i + 1) * self.d]
    }
}

/// Reads a CSV of reals, one row per object. Lines starting with `#` are skipped.
pub fn parse_features<T: Scalar, R: Read>(input: R) -> Result<FeatureMatrix<T>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut rows: Vec<Vec<T>> = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        let parsed = record
            .iter()
            .enumerate()
            .map(|(column, cell)| {
                cell.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .and_then(T::from_f64)
                    .ok_or_else(|| Error::InvalidReal {
                        row,
                        column,
                        value: cell.to_string(),
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(parsed);
    }
    FeatureMatrix::from_rows(&rows)
}

/// Reads one non-negative integer label per line (`#` lines and blank lines skipped).
pub fn parse_label_vector<R: Read>(mut input: R) -> Result<Vec<usize>> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    let labels = text
        .lines()
        .map(str::trim)
        .enumerate()
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .map(|(row, l)| {
            l.parse::<usize>().map_err(|_| Error::InvalidCell {
                row,
                column: 0,
                value: l.to_string(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if labels.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(labels)
}
