//! Point estimation, structure selection, marginal intervals and the
//! benchmark rates used to judge them.

use crate::ddm::{DdmParams, Interval, ModelConfig};
use crate::error::{DdmError, Result};
use crate::numeric::compensated_sum;
use serde::{Deserialize, Serialize};

pub const DEFAULT_THRESHOLD: f64 = 0.5;

/// Mean of the measure: `θ̂ᵢ = φᵢ·μᵢ`.
pub fn posterior_mean(params: &DdmParams) -> Vec<f64> {
    params
        .phi()
        .iter()
        .zip(params.mu())
        .map(|(phi, mu)| phi * mu)
        .collect()
}

/// Estimated configuration `{i : φᵢ > threshold}` and the expected
/// dimension `Σφᵢ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub selected: Vec<usize>,
    pub phi: Vec<f64>,
    pub threshold: f64,
    pub expected_dim: f64,
}

impl SelectionResult {
    pub fn size(&self) -> usize {
        self.selected.len()
    }
}

/// Select coordinates whose slab weight strictly exceeds `threshold`.
/// A weight exactly equal to the threshold is excluded.
pub fn select(params: &DdmParams, threshold: f64) -> Result<SelectionResult> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(DdmError::InvalidThreshold(threshold));
    }
    let phi = params.phi();
    let selected = phi
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > threshold)
        .map(|(i, _)| i)
        .collect();
    Ok(SelectionResult {
        selected,
        phi: phi.to_vec(),
        threshold,
        expected_dim: compensated_sum(phi.iter().copied()),
    })
}

/// Equal-tailed `1 − ζ` interval from the coordinate marginal.
pub fn marginal_interval(params: &DdmParams, i: usize, zeta: f64) -> Result<Interval> {
    if !(zeta > 0.0 && zeta < 0.5) {
        return Err(DdmError::InvalidZeta(zeta));
    }
    let lower = params.marginal_quantile(i, zeta / 2.0)?;
    let upper = params.marginal_quantile(i, 1.0 - zeta / 2.0)?;
    Ok(Interval {
        lower,
        upper,
        contains_atom_at_zero: lower <= 0.0 && 0.0 <= upper && params.phi()[i] < 1.0,
    })
}

/// Minimax squared-ℓ₂ rate `s·log(e·n/s)`, zero at `s = 0`.
pub fn minimax_rate(n: usize, s: usize) -> Result<f64> {
    if s > n {
        return Err(DdmError::SparsityExceedsDimension { s, n });
    }
    if s == 0 {
        return Ok(0.0);
    }
    let s_f = s as f64;
    Ok(s_f * (1.0 + (n as f64 / s_f).ln()))
}

/// Beta-min threshold `H = (2σ²K·log n / α)^½`, given `log n` directly.
pub fn beta_min_threshold(sigma: f64, alpha: f64, a: f64, log_n: f64, k: f64) -> Result<f64> {
    let bound = 2.0 + a;
    if k.is_nan() || k <= bound {
        return Err(DdmError::BetaMinHypothesis { k, bound });
    }
    Ok((2.0 * sigma * sigma * k * log_n / alpha).sqrt())
}

/// Beta-min threshold for the configured dimension.
pub fn beta_min(config: &ModelConfig, k: f64) -> Result<f64> {
    beta_min_threshold(
        config.sigma,
        config.alpha,
        config.a,
        (config.n as f64).ln(),
        k,
    )
}
