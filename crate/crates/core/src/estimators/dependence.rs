use ndarray::{Array2, Axis};

use super::{EmpiricalDistribution, WeakDepParams};
use crate::error::{Error, Result};

/// Lagged covariances of the coordinates, averaged over coordinate pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct AutocovProfile {
    pub lags: Vec<usize>,
    /// Mean over `i` of the empirical `Cov(X_i, X_{i+k})`.
    pub cov: Vec<f64>,
    /// Mean over `i` of the empirical `Cov(X_i², X_{i+k}²)`.
    pub cov_sq: Vec<f64>,
}

impl AutocovProfile {
    /// Plug-in weak-dependence coefficients with `K = 1`.
    ///
    /// `ρ(k)` is the smallest non-increasing majorant of
    /// `max(|cov[k]|, |cov_sq[k]|)`; `rho_inf` sums it over the observed lags.
    pub fn weakdep_params(&self) -> WeakDepParams {
        let raw: Vec<f64> = self
            .cov
            .iter()
            .zip(&self.cov_sq)
            .map(|(a, b)| a.abs().max(b.abs()))
            .collect();
        let mut rho = raw.clone();
        for k in (0..rho.len().saturating_sub(1)).rev() {
            rho[k] = rho[k].max(rho[k + 1]);
        }
        let rho0 = rho.first().copied().unwrap_or(0.0);
        let rho_inf = rho.iter().sum::<f64>();
        let tail = rho.get(1).copied().unwrap_or(0.0);
        WeakDepParams {
            rho0,
            rho_inf: rho_inf.max(rho0),
            rho_max_tail: tail,
            k_scale: 1.0,
        }
    }
}

fn centered_columns(values: &Array2<f64>) -> Array2<f64> {
    let mean = values.mean_axis(Axis(0)).expect("n >= 1");
    values - &mean.insert_axis(Axis(0))
}

fn lagged_average(c: &Array2<f64>, lag: usize) -> f64 {
    let (n, d) = c.dim();
    let width = d - lag;
    let left = c.slice(ndarray::s![.., ..width]);
    let right = c.slice(ndarray::s![.., lag..]);
    let total: f64 = left
        .rows()
        .into_iter()
        .zip(right.rows())
        .map(|(a, b)| a.dot(&b))
        .sum();
    total / (n * width) as f64
}

/// For each lag `k ≤ max_lag`, the coordinate-averaged empirical covariance of
/// `(X_i, X_{i+k})` and of `(X_i², X_{i+k}²)` (denominator `n`).
pub fn autocov_decay(mu: &EmpiricalDistribution, max_lag: usize) -> Result<AutocovProfile> {
    let d = mu.dim();
    if max_lag >= d {
        return Err(Error::InvalidLag {
            lag: max_lag,
            dim: d,
        });
    }
    let x = mu.data().to_owned();
    let c = centered_columns(&x);
    let c_sq = centered_columns(&x.mapv(|v| v * v));
    let lags: Vec<usize> = (0..=max_lag).collect();
    let cov = lags.iter().map(|&k| lagged_average(&c, k)).collect();
    let cov_sq = lags.iter().map(|&k| lagged_average(&c_sq, k)).collect();
    Ok(AutocovProfile { lags, cov, cov_sq })
}

/// `(max_j Var[X_j], max_j Var[X_j²])` over coordinates (denominator `n`).
pub fn max_coordinate_variances(mu: &EmpiricalDistribution) -> (f64, f64) {
    let x = mu.data();
    let var = x.var_axis(Axis(0), 0.0);
    let var_sq = x.mapv(|v| v * v).var_axis(Axis(0), 0.0);
    let max = |a: ndarray::Array1<f64>| a.iter().copied().fold(0.0f64, f64::max);
    (max(var), max(var_sq))
}
