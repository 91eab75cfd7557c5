//! Convergence and timing experiments on synthetic data, with CSV output.

mod config;
mod records;
mod runner;
mod summary;

pub use config::*;
pub use records::*;
pub use runner::*;
pub use summary::*;
