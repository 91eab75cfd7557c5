use std::time::Instant;

use ndarray::Array2;
use rayon::prelude::*;

use super::{EmpiricalDistribution, Method, SwEstimate};
use crate::datagen::{gamma_d_direction_into, sphere_direction_into};
use crate::error::{Error, Result};
use crate::numeric::{ln_gamma_ratio, pairwise_mean, pairwise_sum};
use crate::ot::{check_order, sort_values, wpp_sorted};

/// Law of the random projection directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProjectionLaw {
    /// Uniform on the unit sphere.
    SphereUniform,
    /// `N(0, I_d / d)`.
    GaussianGammaD,
}

impl ProjectionLaw {
    pub fn method(self) -> Method {
        match self {
            ProjectionLaw::SphereUniform => Method::MonteCarloSphere,
            ProjectionLaw::GaussianGammaD => Method::MonteCarloGaussian,
        }
    }

    fn fill(self) -> fn(u64, u64, &mut [f64]) {
        match self {
            ProjectionLaw::SphereUniform => sphere_direction_into,
            ProjectionLaw::GaussianGammaD => gamma_d_direction_into,
        }
    }
}

/// Projections are evaluated in fixed-size chunks (one matrix product each).
const CHUNK: usize = 256;

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloResult {
    /// `estimate.value_sq` is the mean of `per_projection`.
    pub estimate: SwEstimate,
    /// `W_p^p` along each direction, in direction-index order.
    pub per_projection: Vec<f64>,
}

impl MonteCarloResult {
    /// Standard error of the mean of the per-projection values.
    pub fn standard_error(&self) -> f64 {
        let l = self.per_projection.len();
        if l < 2 {
            return f64::NAN;
        }
        let mean = self.estimate.value_sq;
        let sq: Vec<f64> = self
            .per_projection
            .iter()
            .map(|v| (v - mean) * (v - mean))
            .collect();
        (pairwise_sum(&sq) / (l - 1) as f64 / l as f64).sqrt()
    }
}

/// Monte Carlo sliced `SW_p^p` with `projections` random directions.
///
/// Direction `l` comes from the stream keyed by `(seed, l)` and projections are
/// reduced in index order, so the result does not depend on the rayon pool
/// this runs in.
pub fn monte_carlo_sw_pp(
    mu: &EmpiricalDistribution,
    nu: &EmpiricalDistribution,
    projections: usize,
    p: f64,
    law: ProjectionLaw,
    seed: u64,
) -> Result<MonteCarloResult> {
    mu.check_same_shape(nu)?;
    check_order(p)?;
    if projections == 0 {
        return Err(Error::InvalidConfig(
            "number of projections must be at least 1".into(),
        ));
    }
    let start = Instant::now();
    let d = mu.dim();
    let fill = law.fill();
    let chunks: Vec<(usize, usize)> = (0..projections)
        .step_by(CHUNK)
        .map(|lo| (lo, (lo + CHUNK).min(projections)))
        .collect();
    let per_chunk: Vec<Vec<f64>> = chunks
        .into_par_iter()
        .map(|(lo, hi)| {
            let mut theta = Array2::<f64>::zeros((hi - lo, d));
            for (k, mut row) in theta.rows_mut().into_iter().enumerate() {
                fill(
                    seed,
                    (lo + k) as u64,
                    row.as_slice_mut().expect("standard layout"),
                );
            }
            // (k × d)(d × n): each projected dataset is a contiguous row.
            let px = theta.dot(&mu.data().t());
            let py = theta.dot(&nu.data().t());
            px.rows()
                .into_iter()
                .zip(py.rows())
                .map(|(a, b)| {
                    let mut a = a.to_vec();
                    let mut b = b.to_vec();
                    sort_values(&mut a);
                    sort_values(&mut b);
                    wpp_sorted(&a, &b, p)
                })
                .collect()
        })
        .collect();
    let per_projection: Vec<f64> = per_chunk.into_iter().flatten().collect();
    let value = pairwise_mean(&per_projection).expect("at least one projection");
    Ok(MonteCarloResult {
        estimate: SwEstimate {
            value_sq: value,
            method: law.method(),
            num_projections: projections,
            seed,
            wall_time_ns: start.elapsed().as_nanos() as u64,
        },
        per_projection,
    })
}

/// `(2/d)^{1/2} {Γ(d/2 + p/2) / Γ(d/2)}^{1/p}`: ratio of the Gaussian-direction
/// sliced distance to the sphere-direction one. Equals 1 at `p = 2`.
pub fn gaussian_projection_constant(d: usize, p: f64) -> f64 {
    assert!(d >= 1, "dimension must be positive");
    assert!(p >= 1.0, "order must be >= 1");
    let half_d = d as f64 / 2.0;
    let log_ratio = ln_gamma_ratio(half_d, p / 2.0);
    (0.5 * (2.0 / d as f64).ln() + log_ratio / p).exp()
}
