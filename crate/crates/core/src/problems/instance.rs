use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::embedding::VectorSolution;
use crate::error::{invalid, Error, Result};

/// The bilinear form Σ a_ij ε_i δ_j, given by its m×n coefficient matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    a: DMatrix<f64>,
}

#[derive(Deserialize, Serialize)]
struct JsonInstance {
    m: usize,
    n: usize,
    entries: Vec<Vec<f64>>,
}

impl ProblemInstance {
    pub fn new(a: DMatrix<f64>) -> Result<Self> {
        if a.nrows() == 0 || a.ncols() == 0 {
            return Err(invalid("instance", "matrix must have at least one entry"));
        }
        if let Some(pos) = a.iter().position(|x| !x.is_finite()) {
            return Err(invalid(
                "instance",
                format!(
                    "non-finite entry at ({}, {})",
                    pos % a.nrows(),
                    pos / a.nrows()
                ),
            ));
        }
        Ok(Self { a })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if let Some(i) = rows.iter().position(|r| r.len() != n) {
            return Err(Error::Parse(format!(
                "row {} has {} entries, expected {n}",
                i + 1,
                rows[i].len()
            )));
        }
        Self::new(DMatrix::from_fn(m, n, |i, j| rows[i][j]))
    }

    /// Plain comma-separated rows, no header.
    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| {
                let line = e.position().map_or(0, |p| p.line());
                Error::Parse(format!("line {line}: {e}"))
            })?;
            let line = record.position().map_or(0, |p| p.line());
            let row = record
                .iter()
                .map(|field| {
                    field.parse::<f64>().map_err(|_| {
                        Error::Parse(format!("line {line}: `{field}` is not a number"))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(Error::Parse("no rows found".into()));
        }
        Self::from_rows(&rows)
    }

    /// `{"m": .., "n": .., "entries": [[..], ..]}`
    pub fn from_json_str(text: &str) -> Result<Self> {
        let parsed: JsonInstance = serde_json::from_str(text)
            .map_err(|e| Error::Parse(format!("line {}: {e}", e.line())))?;
        if parsed.entries.len() != parsed.m {
            return Err(Error::Parse(format!(
                "declared m = {} but found {} rows",
                parsed.m,
                parsed.entries.len()
            )));
        }
        if let Some(i) = parsed.entries.iter().position(|r| r.len() != parsed.n) {
            return Err(Error::Parse(format!(
                "declared n = {} but row {} has {} entries",
                parsed.n,
                i + 1,
                parsed.entries[i].len()
            )));
        }
        Self::from_rows(&parsed.entries)
    }

    /// JSON if the first non-blank character is `{`, CSV otherwise.
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            Self::from_json_str(text)
        } else {
            Self::from_csv_str(text)
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_json_string(&self) -> String {
        let doc = JsonInstance {
            m: self.m(),
            n: self.n(),
            entries: self.rows(),
        };
        serde_json::to_string(&doc).expect("instance serializes")
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.a
            .row_iter()
            .map(|r| r.iter().copied().collect())
            .collect()
    }

    pub fn m(&self) -> usize {
        self.a.nrows()
    }

    pub fn n(&self) -> usize {
        self.a.ncols()
    }

    pub fn transpose(&self) -> Self {
        Self {
            a: self.a.transpose(),
        }
    }

    /// Σ_i Σ_j a_ij ε_i δ_j, always summed in this order so equal sign
    /// patterns give bit-identical values.
    pub fn objective(&self, eps: &[i8], delta: &[i8]) -> Result<f64> {
        if eps.len() != self.m() || delta.len() != self.n() {
            return Err(Error::DimensionMismatch(format!(
                "signs are {}+{}, instance is {}x{}",
                eps.len(),
                delta.len(),
                self.m(),
                self.n()
            )));
        }
        Ok(self.objective_unchecked(eps, delta))
    }

    pub(crate) fn objective_unchecked(&self, eps: &[i8], delta: &[i8]) -> f64 {
        let mut total = 0.0;
        for (i, &e) in eps.iter().enumerate() {
            for (j, &d) in delta.iter().enumerate() {
                total += self.a[(i, j)] * f64::from(e * d);
            }
        }
        total
    }

    /// Σ a_ij ⟨x_i, y_j⟩.
    pub fn vector_objective(&self, solution: &VectorSolution) -> Result<f64> {
        if solution.m() != self.m() || solution.n() != self.n() {
            return Err(Error::DimensionMismatch(format!(
                "solution is {}+{}, instance is {}x{}",
                solution.m(),
                solution.n(),
                self.m(),
                self.n()
            )));
        }
        Ok(self.a.component_mul(&solution.cross_gram()).sum())
    }
}

/// A sign vector pair together with the objective it attains.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignAssignment {
    pub eps: Vec<i8>,
    pub delta: Vec<i8>,
    pub value: f64,
}

impl SignAssignment {
    pub fn new(instance: &ProblemInstance, eps: Vec<i8>, delta: Vec<i8>) -> Result<Self> {
        let value = instance.objective(&eps, &delta)?;
        Ok(Self { eps, delta, value })
    }
}
