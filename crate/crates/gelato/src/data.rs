//! Observation matrices and their sample moments.

use ndarray::Array2;

use crate::error::{GelatoError, Result};
use crate::matrix::{MatrixRole, SymMatrix};

/// An n x p observation matrix (rows = observations) together with its
/// standardization state. The recorded means were subtracted and the
/// recorded scales divided out, column by column.
#[derive(Debug, Clone)]
pub struct DataSet {
    values: Array2<f64>,
    standardized: bool,
    column_means: Vec<f64>,
    column_scales: Vec<f64>,
}

impl DataSet {
    /// Wrap raw observations. Nothing has been applied yet, so the
    /// recorded means are 0 and the scales 1.
    pub fn new(values: Array2<f64>) -> Result<Self> {
        let (n, p) = values.dim();
        if n < 1 {
            return Err(GelatoError::Config("need at least one observation".into()));
        }
        if p < 2 {
            return Err(GelatoError::Config("need at least two variables".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(GelatoError::Config("non-finite value in data".into()));
        }
        Ok(DataSet {
            values,
            standardized: false,
            column_means: vec![0.0; p],
            column_scales: vec![1.0; p],
        })
    }

    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    pub fn p(&self) -> usize {
        self.values.ncols()
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn is_standardized(&self) -> bool {
        self.standardized
    }

    pub fn column_means(&self) -> &[f64] {
        &self.column_means
    }

    pub fn column_scales(&self) -> &[f64] {
        &self.column_scales
    }

    /// Center and scale every column to empirical mean 0 and standard
    /// deviation 1, with divisor n. Requires n >= 2 and nondegenerate
    /// columns.
    pub fn standardize(&self) -> Result<DataSet> {
        let (n, p) = self.values.dim();
        if n < 2 {
            return Err(GelatoError::Config(
                "standardization needs at least two observations".into(),
            ));
        }
        let nf = n as f64;
        let mut means = vec![0.0; p];
        let mut scales = vec![0.0; p];
        for j in 0..p {
            let col = self.values.column(j);
            let mean = col.sum() / nf;
            let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / nf;
            if var <= f64::EPSILON * (1.0 + mean * mean) {
                return Err(GelatoError::DegenerateColumn { column: j });
            }
            means[j] = mean;
            scales[j] = var.sqrt();
        }
        let mut out = self.values.clone();
        for j in 0..p {
            for i in 0..n {
                out[(i, j)] = (out[(i, j)] - means[j]) / scales[j];
            }
        }
        Ok(DataSet {
            values: out,
            standardized: true,
            column_means: means,
            column_scales: scales,
        })
    }

    /// Apply externally supplied per-column statistics (e.g. from training
    /// folds). The result is not marked standardized: its columns have no
    /// exact mean-zero guarantee.
    pub fn transform_with(&self, means: &[f64], scales: &[f64]) -> Result<DataSet> {
        let (n, p) = self.values.dim();
        if means.len() != p || scales.len() != p {
            return Err(GelatoError::DimensionMismatch { expected: p, got: means.len().min(scales.len()) });
        }
        if let Some(j) = scales.iter().position(|s| *s <= 0.0) {
            return Err(GelatoError::DegenerateColumn { column: j });
        }
        let mut out = self.values.clone();
        for j in 0..p {
            for i in 0..n {
                out[(i, j)] = (out[(i, j)] - means[j]) / scales[j];
            }
        }
        Ok(DataSet {
            values: out,
            standardized: false,
            column_means: means.to_vec(),
            column_scales: scales.to_vec(),
        })
    }

    /// Row subset in the given order, keeping the standardization record.
    pub fn rows(&self, idx: &[usize]) -> DataSet {
        let p = self.p();
        let mut out = Array2::zeros((idx.len(), p));
        for (r, &i) in idx.iter().enumerate() {
            out.row_mut(r).assign(&self.values.row(i));
        }
        DataSet {
            values: out,
            standardized: self.standardized,
            column_means: self.column_means.clone(),
            column_scales: self.column_scales.clone(),
        }
    }
}

/// Sample covariance S = X^T X / n, using that the mean vector is zero
/// (standardized data, or the caller asserts it).
pub fn sample_covariance(data: &DataSet) -> SymMatrix {
    let n = data.n() as f64;
    let s = data.values().t().dot(data.values()) / n;
    SymMatrix::new(s, MatrixRole::Covariance).expect("X^T X is symmetric")
}

/// Sample correlation diag(S)^{-1/2} S diag(S)^{-1/2}, with the diagonal
/// set to exactly one.
pub fn sample_correlation(s: &SymMatrix) -> Result<SymMatrix> {
    let p = s.dim();
    let mut d = vec![0.0; p];
    for i in 0..p {
        let v = s.get(i, i);
        if v <= 0.0 {
            return Err(GelatoError::DegenerateVariance { index: i, value: v });
        }
        d[i] = v.sqrt();
    }
    let mut g = Array2::zeros((p, p));
    for i in 0..p {
        g[(i, i)] = 1.0;
        for j in (i + 1)..p {
            let v = s.get(i, j) / (d[i] * d[j]);
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    SymMatrix::new(g, MatrixRole::Correlation)
}
