//! Batch statistics used as regularizers on learned projections.

use super::{center, EmpiricalDistribution};
use crate::error::{Error, Result};

/// Squared Frobenius norm of the row covariance matrix (denominator `n − 1`).
///
/// Computed through whichever Gram matrix is smaller: `‖X̄ᵀX̄‖_F = ‖X̄X̄ᵀ‖_F`.
pub fn cov_frobenius_sq(batch: &EmpiricalDistribution) -> Result<f64> {
    let n = batch.n();
    if n < 2 {
        return Err(Error::InsufficientSamples { needed: 2, got: n });
    }
    let (_, centered) = center(batch);
    let x = centered.data();
    let gram = if batch.dim() <= n {
        x.t().dot(&x)
    } else {
        x.dot(&x.t())
    };
    let denom = (n - 1) as f64;
    Ok(gram.iter().map(|g| g * g).sum::<f64>() / (denom * denom))
}

/// `n⁻¹ Σ_j ‖x_j‖⁻²`; fails on any zero-norm row.
pub fn mean_inverse_sq_norm(batch: &EmpiricalDistribution) -> Result<f64> {
    let mut total = 0.0;
    for (j, row) in batch.data().rows().into_iter().enumerate() {
        let sq = row.dot(&row);
        if sq == 0.0 {
            return Err(Error::ZeroNormRow { row: j });
        }
        total += sq.recip();
    }
    Ok(total / batch.n() as f64)
}
