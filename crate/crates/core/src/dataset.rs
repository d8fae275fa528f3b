//! Point clouds in `R^d` with uniform weights.

use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::cumulant::{MomentSet, MomentSource};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub family: String,
    pub seed: u64,
}

/// `n ≥ 1` finite points in `R^d`, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    dim: usize,
    points: Vec<f64>,
    provenance: Option<Provenance>,
}

impl Dataset {
    pub fn new(dim: usize, points: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        if points.is_empty() || !points.len().is_multiple_of(dim) {
            return Err(Error::invalid(format!(
                "{} coordinates do not form a nonempty set of {dim}-vectors",
                points.len()
            )));
        }
        if points.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("dataset has non-finite coordinates"));
        }
        Ok(Dataset {
            dim,
            points,
            provenance: None,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Self::new(dim, rows.concat())
    }

    /// One-dimensional dataset.
    pub fn from_values(values: &[f64]) -> Result<Self> {
        Self::new(1, values.to_vec())
    }

    pub fn with_provenance(mut self, family: impl Into<String>, seed: u64) -> Self {
        self.provenance = Some(Provenance {
            family: family.into(),
            seed,
        });
        self
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.points.len() / self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> {
        self.points.chunks_exact(self.dim)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.points
    }

    /// Values of coordinate `k`.
    pub fn column(&self, k: usize) -> Vec<f64> {
        self.points().map(|p| p[k]).collect()
    }

    pub fn mean(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.dim];
        for p in self.points() {
            for (acc, x) in m.iter_mut().zip(p) {
                *acc += x;
            }
        }
        let n = self.n() as f64;
        m.iter_mut().for_each(|x| *x /= n);
        m
    }

    /// The dataset shifted to have mean zero.
    pub fn centered(&self) -> Dataset {
        let m = self.mean();
        let points = self
            .points()
            .flat_map(|p| p.iter().zip(&m).map(|(x, mu)| x - mu).collect::<Vec<_>>())
            .collect();
        Dataset {
            dim: self.dim,
            points,
            provenance: self.provenance.clone(),
        }
    }

    /// Every point mapped through `x ↦ A x`.
    pub fn transformed(&self, a: &DMatrix<f64>) -> Result<Dataset> {
        if a.ncols() != self.dim {
            return Err(Error::Dimension("transform does not match dataset".into()));
        }
        let mut points = Vec::with_capacity(self.n() * a.nrows());
        for p in self.points() {
            for i in 0..a.nrows() {
                points.push((0..self.dim).map(|j| a[(i, j)] * p[j]).sum());
            }
        }
        Ok(Dataset {
            dim: a.nrows(),
            points,
            provenance: self.provenance.clone(),
        })
    }

    /// Reads a CSV file with one point per row. A first row that does not
    /// parse as numbers is treated as a header.
    pub fn from_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut rows = vec![];
        for (i, rec) in reader.records().enumerate() {
            let rec = rec?;
            let parsed: std::result::Result<Vec<f64>, _> =
                rec.iter().map(str::parse::<f64>).collect();
            match parsed {
                Ok(row) => rows.push(row),
                Err(_) if i == 0 => continue,
                Err(e) => return Err(Error::Parse(format!("row {}: {e}", i + 1))),
            }
        }
        Self::from_rows(&rows)
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut w = csv::Writer::from_path(path).map_err(|e| Error::Parse(e.to_string()))?;
        for p in self.points() {
            w.write_record(p.iter().map(|x| format!("{x:?}")))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

impl MomentSource for Dataset {
    fn dim(&self) -> usize {
        self.dim
    }

    /// Empirical raw moments `(1/n) Σ X_i^ν`.
    fn raw_moments(&self, max_order: u32) -> Result<MomentSet> {
        let n = self.n() as f64;
        MomentSet::from_fn(self.dim, max_order, |nu| {
            Ok(self.points().map(|p| nu.monomial(p)).sum::<f64>() / n)
        })
    }
}
