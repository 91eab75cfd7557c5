//! Sliced-Wasserstein distances of order 2 between empirical distributions.
//!
//! Three routes to the same quantity:
//!
//! - exact closed forms ([`ot`]): sorted 1D samples and isotropic Gaussians;
//! - Monte Carlo over random projection directions
//!   ([`estimators::monte_carlo_sw_pp`]);
//! - a deterministic approximation from the means and second moments of the
//!   two datasets ([`estimators::sw_hat`]), accurate when the centered data
//!   are high-dimensional with weakly dependent coordinates.
//!
//! [`datagen`] produces the synthetic regimes, [`bench`] runs the convergence
//! and timing experiments, and [`cli`] exposes everything on the command line.

pub mod bench;
pub mod cli;
pub mod datagen;
pub mod error;
pub mod estimators;
pub mod io;
pub mod numeric;
pub mod ot;
pub mod rng;

pub use error::{Error, Result};
pub use estimators::{EmpiricalDistribution, Method, SwEstimate};
