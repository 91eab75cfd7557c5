//! Exact Wasserstein distances where closed forms exist.
//!
//! | Function | Setting |
//! |----------|---------|
//! | [`wasserstein_1d_pp`] | equal-size empirical measures on the line, by sorting |
//! | [`w2_gaussian_1d`] | two univariate Gaussians |
//! | [`w2_gaussian_iso`] | two isotropic Gaussians `N(m, σ² I_d)` |
//! | [`sw2_gaussian_iso_closed`] | sliced W2 between isotropic Gaussians |

use crate::error::{Error, Result};
use crate::numeric::pairwise_sum_by;

/// Samples on the real line with uniform weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Samples1d {
    values: Vec<f64>,
    sorted: bool,
}

impl Samples1d {
    /// Rejects empty input and any non-finite value.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSample("no samples".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidSample(format!(
                "non-finite value {} at index {i}",
                values[i]
            )));
        }
        Ok(Self {
            values,
            sorted: false,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_sorted(&self) -> bool {
        self.sorted
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Consumes `self` and returns it in non-decreasing order.
    pub fn sorted(mut self) -> Self {
        sort_in_place(&mut self);
        self
    }
}

/// Sorts the samples in non-decreasing order and marks them sorted.
pub fn sort_in_place(xs: &mut Samples1d) {
    if !xs.sorted {
        sort_values(&mut xs.values);
        xs.sorted = true;
    }
}

/// Maps a float to an integer with the same total order.
fn order_key(v: f64) -> u64 {
    let bits = v.to_bits();
    if bits >> 63 == 1 {
        !bits
    } else {
        bits | (1 << 63)
    }
}

fn from_order_key(k: u64) -> f64 {
    f64::from_bits(if k >> 63 == 1 { k & !(1 << 63) } else { !k })
}

/// Ascending sort in the IEEE total order. Integer keys sort about twice as
/// fast as a float comparator.
pub(crate) fn sort_values(values: &mut [f64]) {
    let mut keys: Vec<u64> = values.iter().map(|&v| order_key(v)).collect();
    keys.sort_unstable();
    for (v, k) in values.iter_mut().zip(keys) {
        *v = from_order_key(k);
    }
}

/// Univariate Gaussian `N(mean, variance)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gaussian1d {
    mean: f64,
    variance: f64,
}

impl Gaussian1d {
    pub fn new(mean: f64, variance: f64) -> Result<Self> {
        if !mean.is_finite() || !variance.is_finite() || variance < 0.0 {
            return Err(Error::InvalidSample(format!(
                "Gaussian needs finite mean and variance >= 0, got N({mean}, {variance})"
            )));
        }
        Ok(Self { mean, variance })
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }
}

/// Isotropic Gaussian `N(mean, sigma² I_d)`; `sigma` is a standard deviation.
#[derive(Debug, Clone, PartialEq)]
pub struct IsoGaussian {
    mean: Vec<f64>,
    sigma: f64,
}

impl IsoGaussian {
    pub fn new(mean: Vec<f64>, sigma: f64) -> Result<Self> {
        if mean.is_empty() {
            return Err(Error::InvalidSample(
                "isotropic Gaussian needs dim >= 1".into(),
            ));
        }
        if mean.iter().any(|m| !m.is_finite()) || !sigma.is_finite() || sigma < 0.0 {
            return Err(Error::InvalidSample(
                "isotropic Gaussian needs a finite mean and sigma >= 0".into(),
            ));
        }
        Ok(Self { mean, sigma })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

pub(crate) fn check_order(p: f64) -> Result<()> {
    if p.is_finite() && p >= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidOrder(p))
    }
}

/// `|t|^p` with exact fast paths for the common orders.
#[inline]
pub(crate) fn abs_pow(t: f64, p: f64) -> f64 {
    if p == 2.0 {
        t * t
    } else if p == 1.0 {
        t.abs()
    } else {
        t.abs().powf(p)
    }
}

/// `n⁻¹ Σ |x_(i) − y_(i)|^p` over two already sorted slices of equal length.
pub(crate) fn wpp_sorted(x: &[f64], y: &[f64], p: f64) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    let n = x.len();
    pairwise_sum_by(0, n, &|i| abs_pow(x[i] - y[i], p)) / n as f64
}

/// `W_p^p` between two equal-size empirical measures on the line.
///
/// The optimal coupling of equal-weight atoms pairs order statistics, so this
/// is `n⁻¹ Σ |x_(i) − y_(i)|^p`. Inputs that are not flagged sorted are sorted
/// on a copy.
pub fn wasserstein_1d_pp(x: &Samples1d, y: &Samples1d, p: f64) -> Result<f64> {
    check_order(p)?;
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let xs = sorted_view(x);
    let ys = sorted_view(y);
    Ok(wpp_sorted(&xs, &ys, p))
}

fn sorted_view(x: &Samples1d) -> std::borrow::Cow<'_, [f64]> {
    if x.sorted {
        std::borrow::Cow::Borrowed(&x.values)
    } else {
        let mut v = x.values.clone();
        sort_values(&mut v);
        std::borrow::Cow::Owned(v)
    }
}

/// `W2²` between univariate Gaussians: `(m_a − m_b)² + (√v_a − √v_b)²`.
pub fn w2_gaussian_1d(a: &Gaussian1d, b: &Gaussian1d) -> f64 {
    let dm = a.mean - b.mean;
    let ds = a.variance.sqrt() - b.variance.sqrt();
    dm * dm + ds * ds
}

fn mean_gap_sq(a: &IsoGaussian, b: &IsoGaussian) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(pairwise_sum_by(0, a.dim(), &|i| {
        let t = a.mean[i] - b.mean[i];
        t * t
    }))
}

/// `W2²` between isotropic Gaussians: `‖Δm‖² + d (σ_a − σ_b)²`.
pub fn w2_gaussian_iso(a: &IsoGaussian, b: &IsoGaussian) -> Result<f64> {
    let gap = mean_gap_sq(a, b)?;
    let ds = a.sigma - b.sigma;
    Ok(gap + a.dim() as f64 * ds * ds)
}

/// Sliced `SW2²` between isotropic Gaussians: `‖Δm‖² / d + (σ_a − σ_b)²`.
///
/// Every projection of `N(m, σ² I_d)` on a unit direction θ is
/// `N(⟨θ, m⟩, σ²)`, and the sphere average of `θθᵀ` is `I_d / d`.
pub fn sw2_gaussian_iso_closed(a: &IsoGaussian, b: &IsoGaussian) -> Result<f64> {
    let gap = mean_gap_sq(a, b)?;
    let ds = a.sigma - b.sigma;
    Ok(gap / a.dim() as f64 + ds * ds)
}
