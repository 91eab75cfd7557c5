use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};

use crate::error::{Error, Result};
use crate::numeric::pairwise_sum_by;
use crate::ot::Samples1d;

/// `n` samples in `R^d` with uniform weights; row `j` is sample `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistribution {
    data: Array2<f64>,
}

impl EmpiricalDistribution {
    /// Rejects empty matrices and non-finite entries.
    pub fn new(data: Array2<f64>) -> Result<Self> {
        let (n, d) = data.dim();
        if n == 0 || d == 0 {
            return Err(Error::InvalidSample(format!(
                "dataset must have n >= 1 and d >= 1, got {n}x{d}"
            )));
        }
        if let Some(((row, col), v)) = data.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidSample(format!(
                "non-finite entry {v} at row {row}, column {col}"
            )));
        }
        Ok(Self { data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let d = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|r| r.len() != d) {
            return Err(Error::DimMismatch {
                left: d,
                right: rows[bad].len(),
            });
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        let data = Array2::from_shape_vec((n, d), flat)
            .map_err(|e| Error::InvalidSample(e.to_string()))?;
        Self::new(data)
    }

    /// Caller guarantees every entry is finite and the shape is non-empty.
    pub(crate) fn from_finite(data: Array2<f64>) -> Self {
        debug_assert!(data.nrows() > 0 && data.ncols() > 0);
        debug_assert!(data.iter().all(|v| v.is_finite()));
        Self { data }
    }

    pub fn dim(&self) -> usize {
        self.data.ncols()
    }

    pub fn n(&self) -> usize {
        self.data.nrows()
    }

    pub fn data(&self) -> ArrayView2<'_, f64> {
        self.data.view()
    }

    pub fn into_data(self) -> Array2<f64> {
        self.data
    }

    pub fn row(&self, j: usize) -> ArrayView1<'_, f64> {
        self.data.row(j)
    }

    /// Column-wise empirical mean.
    pub fn mean(&self) -> Array1<f64> {
        let mut sum = pairwise_row_sum(self.data.view());
        sum /= self.n() as f64;
        sum
    }

    /// `n⁻¹ Σ_j ‖x_j‖²`.
    pub fn second_moment(&self) -> f64 {
        pairwise_sum_by(0, self.n(), &|j| {
            let r = self.data.row(j);
            r.dot(&r)
        }) / self.n() as f64
    }

    /// `n⁻¹ Σ_j ‖x_j − c‖²` without materializing the shifted rows.
    pub(crate) fn second_moment_about(&self, c: ArrayView1<'_, f64>) -> f64 {
        pairwise_sum_by(0, self.n(), &|j| {
            self.data
                .row(j)
                .iter()
                .zip(c.iter())
                .map(|(x, m)| (x - m) * (x - m))
                .sum::<f64>()
        }) / self.n() as f64
    }

    pub(crate) fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }

    pub(crate) fn check_same_shape(&self, other: &Self) -> Result<()> {
        self.check_same_dim(other)?;
        if self.n() != other.n() {
            return Err(Error::LengthMismatch {
                left: self.n(),
                right: other.n(),
            });
        }
        Ok(())
    }
}

/// Row-sum with pairwise splitting over rows.
pub(crate) fn pairwise_row_sum(data: ArrayView2<'_, f64>) -> Array1<f64> {
    const BLOCK: usize = 32;
    let n = data.nrows();
    if n <= BLOCK {
        let mut acc = Array1::zeros(data.ncols());
        for row in data.rows() {
            acc += &row;
        }
        acc
    } else {
        let (top, bottom) = data.split_at(Axis(0), n / 2);
        pairwise_row_sum(top) + pairwise_row_sum(bottom)
    }
}

/// Splits a dataset into its mean and the centered dataset `x ↦ x − mean`.
pub fn center(mu: &EmpiricalDistribution) -> (Array1<f64>, EmpiricalDistribution) {
    let mean = mu.mean();
    let centered = &mu.data - &mean.view().insert_axis(Axis(0));
    (mean, EmpiricalDistribution::from_finite(centered))
}

/// The projected samples `{⟨θ, x_j⟩}`, in row order.
pub fn project(mu: &EmpiricalDistribution, theta: ArrayView1<'_, f64>) -> Result<Samples1d> {
    if theta.len() != mu.dim() {
        return Err(Error::DimMismatch {
            left: mu.dim(),
            right: theta.len(),
        });
    }
    let values = mu.data.dot(&theta).to_vec();
    Samples1d::new(values)
}
