use ndarray::s;
use rand::Rng;
use rayon::prelude::*;

use super::EmpiricalDistribution;
use crate::error::{Error, Result};
use crate::numeric::{pairwise_sum, pairwise_sum_by};
use crate::rng::{domain, stream};

/// Pair budget used when `n` exceeds [`FULL_PAIRS_MAX_N`].
pub const DEFAULT_PAIR_BUDGET: u64 = 10_000_000;
/// Largest `n` for which [`PairBudget::auto`] enumerates all `n²` pairs.
pub const FULL_PAIRS_MAX_N: usize = 4000;

/// How the inner-product moments `β_q` are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairBudget {
    /// All `n²` ordered pairs, including `i = j`.
    All,
    /// `pairs` ordered pairs drawn uniformly with replacement.
    Sampled { pairs: u64, seed: u64 },
}

impl PairBudget {
    pub fn auto(n: usize, seed: u64) -> Self {
        if n <= FULL_PAIRS_MAX_N {
            PairBudget::All
        } else {
            PairBudget::Sampled {
                pairs: DEFAULT_PAIR_BUDGET,
                seed,
            }
        }
    }
}

/// Plug-in moment statistics of an empirical measure.
///
/// `m2_raw = E‖X‖²`, `alpha = E|‖X‖² − m2_raw|`,
/// `beta_q = E^{1/q}|⟨X, X'⟩|^q` with `X'` an independent copy.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentStats {
    pub dim: usize,
    pub m2_raw: f64,
    pub mean: Vec<f64>,
    pub alpha: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub pair_count_used: u64,
}

impl MomentStats {
    /// Second moment per coordinate, `m2_raw / d`.
    pub fn m2_normalized(&self) -> f64 {
        self.m2_raw / self.dim as f64
    }

    pub fn mean_norm(&self) -> f64 {
        self.mean.iter().map(|m| m * m).sum::<f64>().sqrt()
    }
}

const GRAM_BLOCK: usize = 128;
const PAIR_CHUNK: u64 = 4096;

pub fn moment_stats(mu: &EmpiricalDistribution, budget: PairBudget) -> Result<MomentStats> {
    let n = mu.n();
    let data = mu.data();
    let sq_norms: Vec<f64> = data.rows().into_iter().map(|r| r.dot(&r)).collect();
    let m2_raw = pairwise_sum(&sq_norms) / n as f64;
    let alpha = pairwise_sum_by(0, n, &|j| (sq_norms[j] - m2_raw).abs()) / n as f64;

    let (abs_sum, sq_sum, pairs) = match budget {
        PairBudget::All => {
            let (a, s) = gram_sums(mu);
            (a, s, (n as u64) * (n as u64))
        }
        PairBudget::Sampled { pairs, seed } => {
            if pairs == 0 {
                return Err(Error::InvalidConfig(
                    "pair budget must be at least 1".into(),
                ));
            }
            let (a, s) = sampled_sums(mu, pairs, seed);
            (a, s, pairs)
        }
    };
    let beta2 = (sq_sum / pairs as f64).sqrt();
    // E|g| ≤ E^{1/2} g² holds exactly; only rounding can break it.
    let beta1 = (abs_sum / pairs as f64).min(beta2);
    Ok(MomentStats {
        dim: mu.dim(),
        m2_raw,
        mean: mu.mean().to_vec(),
        alpha,
        beta1,
        beta2,
        pair_count_used: pairs,
    })
}

/// `(Σ|⟨x_i, x_j⟩|, Σ⟨x_i, x_j⟩²)` over all ordered pairs, by Gram blocks.
fn gram_sums(mu: &EmpiricalDistribution) -> (f64, f64) {
    let n = mu.n();
    let data = mu.data();
    let blocks: Vec<usize> = (0..n).step_by(GRAM_BLOCK).collect();
    let tiles: Vec<(usize, usize)> = blocks
        .iter()
        .enumerate()
        .flat_map(|(a, _)| (a..blocks.len()).map(move |b| (a, b)))
        .collect();
    let partial: Vec<(f64, f64)> = tiles
        .into_par_iter()
        .map(|(a, b)| {
            let ra = blocks[a]..(blocks[a] + GRAM_BLOCK).min(n);
            let rb = blocks[b]..(blocks[b] + GRAM_BLOCK).min(n);
            let gram = data.slice(s![ra, ..]).dot(&data.slice(s![rb, ..]).t());
            let weight = if a == b { 1.0 } else { 2.0 };
            let (mut abs, mut sq) = (0.0, 0.0);
            for g in gram.iter() {
                abs += g.abs();
                sq += g * g;
            }
            (weight * abs, weight * sq)
        })
        .collect();
    let abs: Vec<f64> = partial.iter().map(|t| t.0).collect();
    let sq: Vec<f64> = partial.iter().map(|t| t.1).collect();
    (pairwise_sum(&abs), pairwise_sum(&sq))
}

fn sampled_sums(mu: &EmpiricalDistribution, pairs: u64, seed: u64) -> (f64, f64) {
    let n = mu.n();
    let data = mu.data();
    let chunks = pairs.div_ceil(PAIR_CHUNK);
    let partial: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let count = PAIR_CHUNK.min(pairs - c * PAIR_CHUNK);
            let mut rng = stream(seed, domain::PAIRS, c);
            let (mut abs, mut sq) = (0.0, 0.0);
            for _ in 0..count {
                let i = rng.random_range(0..n);
                let j = rng.random_range(0..n);
                let g = data.row(i).dot(&data.row(j));
                abs += g.abs();
                sq += g * g;
            }
            (abs, sq)
        })
        .collect();
    let abs: Vec<f64> = partial.iter().map(|t| t.0).collect();
    let sq: Vec<f64> = partial.iter().map(|t| t.1).collect();
    (pairwise_sum(&abs), pairwise_sum(&sq))
}

/// `d⁻¹ {α + (m2 β1)^{1/2} + m2^{1/5} β2^{4/5}}`, the projection non-Gaussianity
/// functional.
pub fn xi_d(stats: &MomentStats) -> f64 {
    let m2 = stats.m2_raw;
    (stats.alpha + (m2 * stats.beta1).sqrt() + m2.powf(0.2) * stats.beta2.powf(0.8))
        / stats.dim as f64
}

/// `(Ξ_d(μ) + Ξ_d(ν))^{1/2}`: the Gaussian-approximation error bound with its
/// universal constant set to 1. An order-of-magnitude diagnostic only.
pub fn gaussian_gap_bound(stats_mu: &MomentStats, stats_nu: &MomentStats) -> Result<f64> {
    if stats_mu.dim != stats_nu.dim {
        return Err(Error::DimMismatch {
            left: stats_mu.dim,
            right: stats_nu.dim,
        });
    }
    Ok((xi_d(stats_mu) + xi_d(stats_nu)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::center;
    use ndarray::{array, Array2};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_distr::StandardNormal;

    fn emp(a: Array2<f64>) -> EmpiricalDistribution {
        EmpiricalDistribution::new(a).unwrap()
    }

    fn stats(dim: usize, m2: f64, alpha: f64, beta1: f64, beta2: f64) -> MomentStats {
        MomentStats {
            dim,
            m2_raw: m2,
            mean: vec![0.0; dim],
            alpha,
            beta1,
            beta2,
            pair_count_used: 0,
        }
    }

    /// Direct double loop over ordered pairs.
    fn brute_betas(mu: &EmpiricalDistribution) -> (f64, f64) {
        let n = mu.n();
        let (mut a, mut s) = (0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                let g = mu.row(i).dot(&mu.row(j));
                a += g.abs();
                s += g * g;
            }
        }
        let pairs = (n * n) as f64;
        (a / pairs, (s / pairs).sqrt())
    }

    #[test]
    fn origin_sample_is_all_zero() {
        let st = moment_stats(&emp(array![[0.0, 0.0, 0.0]]), PairBudget::All).unwrap();
        assert_eq!(
            (st.m2_raw, st.alpha, st.beta1, st.beta2),
            (0.0, 0.0, 0.0, 0.0)
        );
        assert_eq!(st.pair_count_used, 1);
        assert_eq!(xi_d(&st), 0.0);
    }

    #[test]
    fn antipodal_pair() {
        let st = moment_stats(&emp(array![[1.0, 0.0], [-1.0, 0.0]]), PairBudget::All).unwrap();
        assert_eq!(
            (st.m2_raw, st.alpha, st.beta1, st.beta2),
            (1.0, 0.0, 1.0, 1.0)
        );
        assert_eq!(st.pair_count_used, 4);
    }

    #[test]
    fn gram_blocks_match_double_loop() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let data = Array2::from_shape_fn((300, 7), |_| rng.sample::<f64, _>(StandardNormal) + 0.3);
        let mu = emp(data);
        let st = moment_stats(&mu, PairBudget::All).unwrap();
        let (b1, b2) = brute_betas(&mu);
        assert!((st.beta1 - b1).abs() < 1e-12 * b1);
        assert!((st.beta2 - b2).abs() < 1e-12 * b2);
    }

    #[test]
    fn gaussian_rows_population_identities() {
        let (n, d) = (10_000, 16);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let data = Array2::from_shape_fn((n, d), |_| rng.sample::<f64, _>(StandardNormal));
        let mu = emp(data);
        let st = moment_stats(
            &mu,
            PairBudget::Sampled {
                pairs: 1_000_000,
                seed: 2,
            },
        )
        .unwrap();
        // ‖X‖² ~ χ²_d: standard error √(2d/n).
        assert!((st.m2_raw - d as f64).abs() < 3.0 * (2.0 * d as f64 / n as f64).sqrt());
        // E⟨X,X'⟩² = d, Var⟨X,X'⟩² = 3d² + 6d - d² ≈ 2d²+6d over 1e6 pairs (plus
        // the sampling error of the empirical measure itself).
        assert!((st.beta2 - (d as f64).sqrt()).abs() < 0.05 * (d as f64).sqrt());
        assert_eq!(st.pair_count_used, 1_000_000);
    }

    #[test]
    fn sampled_mode_is_reproducible() {
        let mu = emp(Array2::from_shape_fn((50, 3), |(i, j)| {
            ((i * 7 + j * 3) % 11) as f64 - 5.0
        }));
        let budget = PairBudget::Sampled {
            pairs: 10_001,
            seed: 4,
        };
        assert_eq!(
            moment_stats(&mu, budget).unwrap(),
            moment_stats(&mu, budget).unwrap()
        );
        assert!(moment_stats(&mu, PairBudget::Sampled { pairs: 0, seed: 0 }).is_err());
        assert_eq!(PairBudget::auto(4000, 1), PairBudget::All);
        assert!(matches!(
            PairBudget::auto(4001, 1),
            PairBudget::Sampled {
                pairs: DEFAULT_PAIR_BUDGET,
                ..
            }
        ));
    }

    #[test]
    fn xi_examples() {
        assert_eq!(xi_d(&stats(3, 0.0, 0.0, 0.0, 0.0)), 0.0);
        assert_eq!(xi_d(&stats(1, 1.0, 1.0, 1.0, 1.0)), 3.0);
        let base = stats(4, 2.0, 0.5, 0.7, 0.9);
        let doubled = MomentStats {
            alpha: 1.0,
            ..base.clone()
        };
        assert!((xi_d(&doubled) - xi_d(&base) - 0.5 / 4.0).abs() < 1e-15);
    }

    #[test]
    fn gap_bound_examples() {
        let zero = stats(2, 0.0, 0.0, 0.0, 0.0);
        assert_eq!(gaussian_gap_bound(&zero, &zero).unwrap(), 0.0);
        let four = stats(1, 0.0, 4.0, 0.0, 0.0);
        assert_eq!(
            gaussian_gap_bound(&four, &zero.clone_with_dim(1)).unwrap(),
            2.0
        );
        let a = stats(2, 1.0, 0.3, 0.2, 0.4);
        let b = stats(2, 3.0, 0.1, 0.5, 0.9);
        assert_eq!(
            gaussian_gap_bound(&a, &b).unwrap(),
            gaussian_gap_bound(&b, &a).unwrap()
        );
        assert!(gaussian_gap_bound(&a, &four).is_err());
    }

    impl MomentStats {
        fn clone_with_dim(&self, dim: usize) -> Self {
            MomentStats {
                dim,
                mean: vec![0.0; dim],
                ..self.clone()
            }
        }
    }

    proptest! {
        #[test]
        fn cauchy_schwarz_chain_and_centering(
            rows in prop::collection::vec(prop::collection::vec(-5.0..5.0f64, 3), 1..25),
        ) {
            let mu = EmpiricalDistribution::from_rows(&rows).unwrap();
            let st = moment_stats(&mu, PairBudget::All).unwrap();
            prop_assert!(st.beta1 <= st.beta2);
            prop_assert!(st.beta2 <= st.m2_raw * (1.0 + 1e-12) + 1e-300);
            prop_assert!(st.alpha >= 0.0);

            let (mean, centered) = center(&mu);
            let sc = moment_stats(&centered, PairBudget::All).unwrap();
            let mean_sq = mean.dot(&mean);
            prop_assert!((st.m2_raw - (sc.m2_raw + mean_sq)).abs() <= 1e-10 * st.m2_raw.max(1e-12));
            prop_assert!(st.beta2 * st.beta2 >= sc.beta2 * sc.beta2 * (1.0 - 1e-12) - 1e-12);
        }

        #[test]
        fn xi_is_monotone(
            m2 in 0.0..10.0f64, alpha in 0.0..10.0f64, b1 in 0.0..10.0f64, b2 in 0.0..10.0f64,
            bump in 0.0..5.0f64,
        ) {
            let base = stats(5, m2, alpha, b1, b2);
            let x = xi_d(&base);
            prop_assert!(x >= 0.0);
            let bumped = MomentStats { alpha: alpha + bump, ..base.clone() };
            prop_assert!(xi_d(&bumped) >= x);
            let bumped = MomentStats { beta1: b1 + bump, ..base.clone() };
            prop_assert!(xi_d(&bumped) >= x);
            let bumped = MomentStats { beta2: b2 + bump, ..base.clone() };
            prop_assert!(xi_d(&bumped) >= x);
            let bumped = MomentStats { m2_raw: m2 + bump, ..base.clone() };
            prop_assert!(xi_d(&bumped) >= x);
        }
    }
}
