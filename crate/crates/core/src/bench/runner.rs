use std::time::Instant;

use rayon::prelude::*;

use super::config::{ExperimentConfig, Reference, Scenario};
use super::records::{distance_error, ResultRecord};
use crate::datagen::{
    gen_ar1, gen_factors_with_params, Ar1Config, FactorConfig, FactorParams, Role,
};
use crate::error::{Error, Result};
use crate::estimators::{monte_carlo_sw_pp, EmpiricalDistribution, ProjectionLaw};
use crate::ot::{sw2_gaussian_iso_closed, IsoGaussian};
use crate::rng::derive_seed;

/// Seed-stream tags under a cell seed.
const FIRST_DATASET: u64 = 0;
const SECOND_DATASET: u64 = 1;
const REFERENCE_STREAM: u64 = 2;
const METHOD_STREAM: u64 = 3;

#[derive(Debug, Clone, Copy)]
struct Cell {
    alpha: Option<f64>,
    d: usize,
    run: usize,
}

fn cells(cfg: &ExperimentConfig) -> Vec<Cell> {
    let mut out = Vec::new();
    for alpha in cfg.alphas() {
        for &d in &cfg.d_grid {
            for run in 0..cfg.runs {
                out.push(Cell { alpha, d, run });
            }
        }
    }
    out
}

fn cell_seed(cfg: &ExperimentConfig, cell: &Cell) -> u64 {
    derive_seed(
        cfg.master_seed,
        &[
            cfg.scenario.tag(),
            cell.alpha.map_or(u64::MAX, f64::to_bits),
            cell.d as u64,
            cell.run as u64,
        ],
    )
}

struct Pair {
    x: EmpiricalDistribution,
    y: EmpiricalDistribution,
    /// Law parameters, for the closed-form reference.
    params: Option<(FactorParams, FactorParams)>,
}

fn generate_pair(cfg: &ExperimentConfig, cell: &Cell, seed: u64) -> Result<Pair> {
    let sx = derive_seed(seed, &[FIRST_DATASET]);
    let sy = derive_seed(seed, &[SECOND_DATASET]);
    if let Some(family) = cfg.scenario.factor_family() {
        let make = |role, seed| FactorConfig {
            dim: cell.d,
            n: cfg.n,
            family,
            centered: cfg.scenario.is_centered(),
            role,
            seed,
        };
        let (x, px) = gen_factors_with_params(&make(Role::First, sx))?;
        let (y, py) = gen_factors_with_params(&make(Role::Second, sy))?;
        Ok(Pair {
            x,
            y,
            params: Some((px, py)),
        })
    } else {
        let noise = cfg.scenario.ar1_noise().expect("AR(1) scenario");
        let alpha = cell.alpha.expect("AR(1) cell has alpha");
        let make = |seed| Ar1Config {
            dim: cell.d,
            n: cfg.n,
            alpha,
            noise,
            burn_in: cfg.burn_in,
            seed,
        };
        Ok(Pair {
            x: gen_ar1(&make(sx))?,
            y: gen_ar1(&make(sy))?,
            params: None,
        })
    }
}

fn closed_form_reference(scenario: Scenario, pair: &Pair) -> Result<f64> {
    let Some((px, py)) = &pair.params else {
        // Both AR(1) datasets follow the same law.
        return Ok(0.0);
    };
    let iso = |p: &FactorParams| -> Result<IsoGaussian> {
        match p {
            FactorParams::Gaussian { means, sigma } => {
                let m = if scenario.is_centered() {
                    vec![0.0; means.len()]
                } else {
                    means.clone()
                };
                IsoGaussian::new(m, *sigma)
            }
            FactorParams::Gamma { .. } => Err(Error::InvalidConfig(format!(
                "{scenario} has no closed-form reference"
            ))),
        }
    };
    sw2_gaussian_iso_closed(&iso(px)?, &iso(py)?)
}

fn reference_sq(cfg: &ExperimentConfig, pair: &Pair, seed: u64) -> Result<f64> {
    match cfg.reference {
        Reference::ClosedForm => closed_form_reference(cfg.scenario, pair),
        Reference::MonteCarlo { projections } => Ok(monte_carlo_sw_pp(
            &pair.x,
            &pair.y,
            projections,
            2.0,
            ProjectionLaw::SphereUniform,
            derive_seed(seed, &[REFERENCE_STREAM]),
        )?
        .estimate
        .value_sq),
    }
}

fn cell_context(cfg: &ExperimentConfig, cell: &Cell) -> String {
    match cell.alpha {
        Some(a) => format!("{} alpha={a} d={} run={}", cfg.scenario, cell.d, cell.run),
        None => format!("{} d={} run={}", cfg.scenario, cell.d, cell.run),
    }
}

fn eval_cell(cfg: &ExperimentConfig, cell: &Cell, repetitions: usize) -> Result<Vec<ResultRecord>> {
    let seed = cell_seed(cfg, cell);
    let pair = generate_pair(cfg, cell, seed)?;
    let reference = reference_sq(cfg, &pair, seed)?;
    cfg.methods
        .iter()
        .enumerate()
        .map(|(k, method)| {
            let method_seed = derive_seed(seed, &[METHOD_STREAM, k as u64]);
            let (est, wall_time_ns) = time_median(repetitions, || {
                method.evaluate(&pair.x, &pair.y, method_seed)
            })?;
            Ok(ResultRecord {
                scenario: cfg.scenario.name().to_string(),
                run_id: cell.run,
                d: cell.d,
                n: cfg.n,
                alpha: cell.alpha,
                method: method.label(),
                estimate_sq: est.value_sq,
                reference_sq: reference,
                abs_error: distance_error(est.value_sq, reference),
                wall_time_ns,
                seed,
            })
        })
        .collect()
}

/// Calls `f` `repetitions` times and returns the last result with the median
/// wall time of the calls.
pub fn time_median<T, F>(repetitions: usize, mut f: F) -> Result<(T, u64)>
where
    F: FnMut() -> Result<T>,
{
    assert!(repetitions >= 1, "at least one repetition");
    let mut times = Vec::with_capacity(repetitions);
    let mut last = None;
    for _ in 0..repetitions {
        let start = Instant::now();
        let v = f()?;
        times.push(start.elapsed().as_nanos() as u64);
        last = Some(v);
    }
    times.sort_unstable();
    let mid = times.len() / 2;
    let median = if times.len() % 2 == 1 {
        times[mid]
    } else {
        ((times[mid - 1] as u128 + times[mid] as u128) / 2) as u64
    };
    Ok((last.expect("at least one repetition"), median))
}

fn pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("cannot start worker pool: {e}")))
}

fn run_cells(
    cfg: &ExperimentConfig,
    repetitions: usize,
    threads: usize,
) -> Result<Vec<ResultRecord>> {
    cfg.validate()?;
    let cells = cells(cfg);
    let work = || -> Result<Vec<ResultRecord>> {
        let per_cell: Vec<Vec<ResultRecord>> = cells
            .par_iter()
            .map(|cell| {
                eval_cell(cfg, cell, repetitions).map_err(|e| e.context(cell_context(cfg, cell)))
            })
            .collect::<Result<_>>()?;
        Ok(per_cell.into_iter().flatten().collect())
    };
    if threads == 0 {
        work()
    } else {
        pool(threads)?.install(work)
    }
}

/// Error of each configured method against the reference, one record per
/// (alpha, d, run, method), in that nesting order.
///
/// Cells run in parallel on `cfg.workers` threads. Every cell draws from
/// streams keyed by its own seed, so the records do not depend on the worker
/// count.
pub fn run_convergence(cfg: &ExperimentConfig) -> Result<Vec<ResultRecord>> {
    run_cells(cfg, 1, cfg.workers)
}

/// Like [`run_convergence`] but on a single worker, with `wall_time_ns` the
/// median over `cfg.timing_repetitions` calls of the estimator alone.
pub fn run_timing(cfg: &ExperimentConfig) -> Result<Vec<ResultRecord>> {
    run_cells(cfg, cfg.timing_repetitions, 1)
}
