//! Sliced-Wasserstein estimators and their diagnostics.
//!
//! - [`monte_carlo_sw_pp`]: average of 1D transport costs along random
//!   directions, uniform on the sphere or Gaussian.
//! - [`sw_hat`]: deterministic `O(nd)` approximation from first and second
//!   moments.
//! - [`moment_stats`], [`xi_d`] and the bound evaluators quantify how far a
//!   typical projection is from Gaussian.

mod approx;
mod bounds;
mod dependence;
mod empirical;
mod moments;
mod monte_carlo;
mod regularizers;

pub use approx::{
    fit_iso_gaussian, sw_closed_form_fitted, sw_gaussian_uncentered, sw_hat,
    sw_translation_decompose, TranslationDecomposition,
};
pub use bounds::{indep_bound, weakdep_bound, WeakDepParams};
pub use dependence::{autocov_decay, max_coordinate_variances, AutocovProfile};
pub use empirical::{center, project, EmpiricalDistribution};
pub use moments::{
    gaussian_gap_bound, moment_stats, xi_d, MomentStats, PairBudget, DEFAULT_PAIR_BUDGET,
    FULL_PAIRS_MAX_N,
};
pub use monte_carlo::{
    gaussian_projection_constant, monte_carlo_sw_pp, MonteCarloResult, ProjectionLaw,
};
pub use regularizers::{cov_frobenius_sq, mean_inverse_sq_norm};

use std::fmt;

/// How an [`SwEstimate`] was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    MonteCarloSphere,
    MonteCarloGaussian,
    /// Moment-based approximation with the mean correction ([`sw_hat`]).
    Deterministic,
    /// Moment-based approximation on raw second moments ([`sw_gaussian_uncentered`]).
    GaussianUncentered,
    /// Closed form between fitted isotropic Gaussians.
    ClosedFormGaussian,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::MonteCarloSphere => "mc-sphere",
            Method::MonteCarloGaussian => "mc-gaussian",
            Method::Deterministic => "deterministic",
            Method::GaussianUncentered => "gaussian-uncentered",
            Method::ClosedFormGaussian => "closed-form-gauss",
        }
    }

    pub fn is_monte_carlo(self) -> bool {
        matches!(self, Method::MonteCarloSphere | Method::MonteCarloGaussian)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A sliced distance estimate with its provenance.
///
/// `value_sq` is `SW_p^p`, the squared distance for the default order `p = 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwEstimate {
    pub value_sq: f64,
    pub method: Method,
    /// Zero for every non-Monte Carlo method.
    pub num_projections: usize,
    pub seed: u64,
    pub wall_time_ns: u64,
}
