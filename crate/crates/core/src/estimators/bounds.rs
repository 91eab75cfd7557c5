//! Closed-form upper bounds on `Ξ_d` for independent and weakly dependent
//! coordinates. Universal constants are set to 1, so these are diagnostics of
//! the decay rate in `d`, not certified envelopes.

use crate::error::{Error, Result};

/// `d^{-1/2} max Var[X_j²]^{1/2} + (d^{-1/4} + d^{-2/5}) max Var[X_j]`.
pub fn indep_bound(d: usize, max_var: f64, max_var_sq: f64) -> f64 {
    let d = d as f64;
    d.powf(-0.5) * max_var_sq.sqrt() + (d.powf(-0.25) + d.powf(-0.4)) * max_var
}

/// Covariance-decay coefficients of a fourth-order weakly dependent sequence.
///
/// `rho0 = ρ(0)`, `rho_inf ≥ Σ_k ρ(k)`, `rho_max_tail = max_{1≤k<d} ρ(k)`, and
/// `k_scale` the constant `K` with `|Cov(X_i, X_j)|, |Cov(X_i², X_j²)| ≤ K ρ(j − i)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakDepParams {
    pub rho0: f64,
    pub rho_inf: f64,
    pub rho_max_tail: f64,
    pub k_scale: f64,
}

impl WeakDepParams {
    pub fn new(rho0: f64, rho_inf: f64, rho_max_tail: f64, k_scale: f64) -> Result<Self> {
        let finite_nonneg = [rho0, rho_inf, rho_max_tail, k_scale]
            .iter()
            .all(|v| v.is_finite() && *v >= 0.0);
        if !finite_nonneg || rho_max_tail > rho0 || rho0 > rho_inf {
            return Err(Error::InvalidConfig(format!(
                "weak-dependence parameters need 0 <= rho_max_tail <= rho0 <= rho_inf and K >= 0, \
                 got rho0={rho0}, rho_inf={rho_inf}, rho_max_tail={rho_max_tail}, K={k_scale}"
            )));
        }
        Ok(Self {
            rho0,
            rho_inf,
            rho_max_tail,
            k_scale,
        })
    }
}

/// `d^{-1/2}(ρ0 + 2ρ∞)^{1/2} + d^{-1/4} ρ0^{1/2} S^{1/4} + d^{-2/5} ρ0^{1/5} S^{2/5}`
/// with `S = ρ0² + 2 ρ∞ max_k ρ(k)`. `K` is absorbed into the unit constant.
pub fn weakdep_bound(d: usize, params: &WeakDepParams) -> f64 {
    let d = d as f64;
    let WeakDepParams {
        rho0,
        rho_inf,
        rho_max_tail,
        ..
    } = *params;
    let s = rho0 * rho0 + 2.0 * rho_inf * rho_max_tail;
    d.powf(-0.5) * (rho0 + 2.0 * rho_inf).sqrt()
        + d.powf(-0.25) * rho0.sqrt() * s.powf(0.25)
        + d.powf(-0.4) * rho0.powf(0.2) * s.powf(0.4)
}
