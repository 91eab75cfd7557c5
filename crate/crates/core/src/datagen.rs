//! Seeded generators for projection directions and the synthetic datasets.
//!
//! All generators are pure functions of their configuration: each row (or
//! direction) has its own counter-based stream, so output is bitwise stable
//! across runs and thread counts.

use ndarray::{Array2, Axis};
use rand::Rng;
use rand_distr::{Distribution, Gamma, Normal, StandardNormal, StudentT, Uniform};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimators::{center, EmpiricalDistribution};
use crate::rng::{domain, stream};

/// Fills `out` with the direction of index `index` drawn uniformly on `S^{d−1}`.
pub fn sphere_direction_into(seed: u64, index: u64, out: &mut [f64]) {
    let mut rng = stream(seed, domain::PROJECTIONS, index);
    loop {
        for v in out.iter_mut() {
            *v = rng.sample(StandardNormal);
        }
        let norm = out.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            out.iter_mut().for_each(|v| *v /= norm);
            return;
        }
    }
}

/// Fills `out` with the direction of index `index` drawn from `N(0, I_d / d)`.
pub fn gamma_d_direction_into(seed: u64, index: u64, out: &mut [f64]) {
    let mut rng = stream(seed, domain::PROJECTIONS, index);
    let scale = (out.len() as f64).sqrt().recip();
    for v in out.iter_mut() {
        let z: f64 = rng.sample(StandardNormal);
        *v = z * scale;
    }
}

fn directions(d: usize, seed: u64, count: usize, fill: fn(u64, u64, &mut [f64])) -> Array2<f64> {
    let mut out = Array2::zeros((count, d));
    out.axis_iter_mut(Axis(0))
        .into_par_iter()
        .enumerate()
        .for_each(|(i, mut row)| {
            fill(seed, i as u64, row.as_slice_mut().expect("standard layout"));
        });
    out
}

/// `count` unit vectors uniform on the sphere, one per row.
pub fn sample_sphere(d: usize, seed: u64, count: usize) -> Array2<f64> {
    assert!(d >= 1, "dimension must be positive");
    directions(d, seed, count, sphere_direction_into)
}

/// `count` draws from `N(0, I_d / d)`, one per row.
pub fn sample_gamma_d(d: usize, seed: u64, count: usize) -> Array2<f64> {
    assert!(d >= 1, "dimension must be positive");
    directions(d, seed, count, gamma_d_direction_into)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FactorFamily {
    GaussianFactors,
    GammaFactors,
}

/// Which of the two datasets of an experiment; selects the hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    First,
    Second,
}

impl Role {
    fn tag(self) -> u64 {
        match self {
            Role::First => 1,
            Role::Second => 2,
        }
    }
}

/// Independent-coordinate dataset recipe.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FactorConfig {
    pub dim: usize,
    pub n: usize,
    pub family: FactorFamily,
    pub centered: bool,
    pub role: Role,
    pub seed: u64,
}

/// Per-coordinate law parameters drawn for one factor dataset.
#[derive(Debug, Clone, PartialEq)]
pub enum FactorParams {
    /// Coordinate `j` is `N(means[j], sigma²)`.
    Gaussian { means: Vec<f64>, sigma: f64 },
    /// Coordinate `j` is `Gamma(shapes[j], scale)`.
    Gamma { shapes: Vec<f64>, scale: f64 },
}

impl FactorParams {
    /// Population mean of each coordinate.
    pub fn coordinate_means(&self) -> Vec<f64> {
        match self {
            FactorParams::Gaussian { means, .. } => means.clone(),
            FactorParams::Gamma { shapes, scale } => shapes.iter().map(|k| k * scale).collect(),
        }
    }
}

/// Gaussian standard deviations: variance 1 for the first dataset, 10 for the second.
pub fn gaussian_sigma(role: Role) -> f64 {
    match role {
        Role::First => 1.0,
        Role::Second => 10f64.sqrt(),
    }
}

fn gamma_shape_range(role: Role) -> (f64, f64) {
    match role {
        Role::First => (1.0, 5.0),
        Role::Second => (5.0, 10.0),
    }
}

fn gamma_scale(role: Role) -> f64 {
    match role {
        Role::First => 2.0,
        Role::Second => 3.0,
    }
}

fn check_shape(dim: usize, n: usize) -> Result<()> {
    if dim == 0 || n == 0 {
        return Err(Error::InvalidConfig(format!(
            "dimension and sample count must be positive, got d={dim}, n={n}"
        )));
    }
    Ok(())
}

/// Draws the hyperparameters of a factor dataset from its own stream.
pub fn factor_params(cfg: &FactorConfig) -> FactorParams {
    let mut rng = stream(cfg.seed, domain::FACTOR_HYPER, cfg.role.tag());
    match cfg.family {
        FactorFamily::GaussianFactors => {
            let prior = Normal::new(1.0, 1.0).expect("valid normal");
            FactorParams::Gaussian {
                means: (0..cfg.dim).map(|_| prior.sample(&mut rng)).collect(),
                sigma: gaussian_sigma(cfg.role),
            }
        }
        FactorFamily::GammaFactors => {
            let (lo, hi) = gamma_shape_range(cfg.role);
            let prior = Uniform::new(lo, hi).expect("valid range");
            FactorParams::Gamma {
                shapes: (0..cfg.dim).map(|_| prior.sample(&mut rng)).collect(),
                scale: gamma_scale(cfg.role),
            }
        }
    }
}

fn fill_rows<F>(n: usize, d: usize, seed: u64, stream_domain: u64, fill: F) -> Array2<f64>
where
    F: Fn(&mut rand_chacha::ChaCha8Rng, &mut [f64]) + Sync,
{
    let mut data = Array2::zeros((n, d));
    data.axis_iter_mut(Axis(0))
        .into_par_iter()
        .enumerate()
        .for_each(|(j, mut row)| {
            let mut rng = stream(seed, stream_domain, j as u64);
            fill(&mut rng, row.as_slice_mut().expect("standard layout"));
        });
    data
}

/// Generates a factor dataset together with the parameters of its law.
pub fn gen_factors_with_params(
    cfg: &FactorConfig,
) -> Result<(EmpiricalDistribution, FactorParams)> {
    check_shape(cfg.dim, cfg.n)?;
    let params = factor_params(cfg);
    let row_domain = domain::FACTOR_ROWS ^ (cfg.role.tag() << 40);
    let data = match &params {
        FactorParams::Gaussian { means, sigma } => {
            let laws: Vec<Normal<f64>> = means
                .iter()
                .map(|&m| Normal::new(m, *sigma).expect("finite parameters"))
                .collect();
            fill_rows(cfg.n, cfg.dim, cfg.seed, row_domain, |rng, row| {
                for (v, law) in row.iter_mut().zip(&laws) {
                    *v = law.sample(rng);
                }
            })
        }
        FactorParams::Gamma { shapes, scale } => {
            let laws: Vec<Gamma<f64>> = shapes
                .iter()
                .map(|&k| Gamma::new(k, *scale).expect("positive parameters"))
                .collect();
            fill_rows(cfg.n, cfg.dim, cfg.seed, row_domain, |rng, row| {
                for (v, law) in row.iter_mut().zip(&laws) {
                    *v = law.sample(rng);
                }
            })
        }
    };
    let mut mu = EmpiricalDistribution::from_finite(data);
    if cfg.centered {
        mu = center(&mu).1;
    }
    Ok((mu, params))
}

/// Generates a dataset whose coordinates are independent Gaussians or Gammas.
pub fn gen_factors(cfg: &FactorConfig) -> Result<EmpiricalDistribution> {
    gen_factors_with_params(cfg).map(|(mu, _)| mu)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ar1Noise {
    /// `N(0, 1)` innovations.
    Gaussian01,
    /// Student-t innovations with 10 degrees of freedom.
    StudentT10,
}

pub const DEFAULT_BURN_IN: usize = 10_000;

/// Stationary AR(1) dataset recipe: each row is one trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ar1Config {
    pub dim: usize,
    pub n: usize,
    pub alpha: f64,
    pub noise: Ar1Noise,
    pub burn_in: usize,
    pub seed: u64,
}

impl Ar1Config {
    pub fn new(dim: usize, n: usize, alpha: f64, noise: Ar1Noise, seed: u64) -> Self {
        Self {
            dim,
            n,
            alpha,
            noise,
            burn_in: DEFAULT_BURN_IN,
            seed,
        }
    }
}

/// Generates `n` independent AR(1) trajectories `X_1 = ε_1`,
/// `X_t = α X_{t−1} + ε_t`, keeping the last `d` of `burn_in + d` steps.
pub fn gen_ar1(cfg: &Ar1Config) -> Result<EmpiricalDistribution> {
    check_shape(cfg.dim, cfg.n)?;
    if !(0.0..1.0).contains(&cfg.alpha) {
        return Err(Error::InvalidConfig(format!(
            "AR(1) coefficient must lie in [0, 1), got {}",
            cfg.alpha
        )));
    }
    let alpha = cfg.alpha;
    let burn_in = cfg.burn_in;
    let data = match cfg.noise {
        Ar1Noise::Gaussian01 => {
            fill_rows(cfg.n, cfg.dim, cfg.seed, domain::AR1_ROWS, |rng, row| {
                ar1_trajectory(rng, &StandardNormal, alpha, burn_in, row)
            })
        }
        Ar1Noise::StudentT10 => {
            let t = StudentT::new(10.0).expect("positive degrees of freedom");
            fill_rows(
                cfg.n,
                cfg.dim,
                cfg.seed,
                domain::AR1_ROWS | (1 << 40),
                |rng, row| ar1_trajectory(rng, &t, alpha, burn_in, row),
            )
        }
    };
    Ok(EmpiricalDistribution::from_finite(data))
}

fn ar1_trajectory<R, D>(rng: &mut R, noise: &D, alpha: f64, burn_in: usize, row: &mut [f64])
where
    R: Rng,
    D: Distribution<f64>,
{
    let mut x: f64 = noise.sample(rng);
    // x now holds step 1; advance to step `burn_in` before recording.
    for _ in 1..burn_in {
        x = alpha * x + noise.sample(rng);
    }
    for (t, v) in row.iter_mut().enumerate() {
        if t > 0 || burn_in > 0 {
            x = alpha * x + noise.sample(rng);
        }
        *v = x;
    }
}
