//! The data-dependent measure.
//!
//! Given observations `y` and a [`ModelConfig`], the measure is the product
//! over coordinates of `φᵢ·N(μᵢ, τ²) + (1 − φᵢ)·δ₀` with
//!
//! ```text
//! μᵢ        = yᵢ
//! τ²        = σ² / (α + γ)
//! logit φᵢ  = logit λₙ + ½·log(γ / (α + γ)) + α·yᵢ² / (2σ²)
//! λₙ        = n^-(1+a)
//! ```
//!
//! Everything here is closed form. `logit φᵢ` is kept next to `φᵢ` so that
//! `log φᵢ` and `log(1 − φᵢ)` can be evaluated without cancellation when the
//! quadratic term is huge.

use crate::error::{DdmError, Result};
use crate::numeric::{compensated_sum, logistic, logit, norm_cdf, norm_quantile, softplus};
use crate::rng::{derive_seed, stream};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const DEFAULT_ALPHA: f64 = 0.49;
pub const DEFAULT_GAMMA: f64 = 1.0;
pub const DEFAULT_A: f64 = 1.0;
/// Largest MGF window that holds for every subgaussian law.
pub const DEFAULT_T: f64 = 0.25;
/// MGF window of `(Z/σ)²` for Gaussian errors.
pub const GAUSSIAN_T: f64 = 0.5;

/// Below this dimension `fit` stays on the calling thread.
const PARALLEL_FIT_MIN: usize = 1 << 15;
/// Draws per independently seeded Monte Carlo block.
const DRAW_BLOCK: usize = 256;

fn default_alpha() -> f64 {
    DEFAULT_ALPHA
}
fn default_gamma() -> f64 {
    DEFAULT_GAMMA
}
fn default_a() -> f64 {
    DEFAULT_A
}
fn default_t() -> f64 {
    DEFAULT_T
}
fn default_sigma() -> f64 {
    1.0
}

/// Fixed knobs of the measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub n: usize,
    /// Subgaussian variance proxy of the errors.
    #[serde(default = "default_sigma")]
    pub sigma: f64,
    /// Likelihood fraction; must satisfy `alpha < 2 * t_window`.
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    /// Sparsity exponent in `λₙ = n^-(1+a)`.
    #[serde(default = "default_a")]
    pub a: f64,
    /// Upper endpoint of the MGF window of `(Z/σ)²`.
    #[serde(rename = "T", default = "default_t")]
    pub t_window: f64,
    #[serde(default)]
    pub rng_seed: u64,
}

impl ModelConfig {
    /// Defaults (`σ = 1, α = 0.49, γ = 1, a = 1, T = 1/4`) for dimension `n`.
    pub fn new(n: usize) -> Self {
        Self {
            n,
            sigma: 1.0,
            alpha: DEFAULT_ALPHA,
            gamma: DEFAULT_GAMMA,
            a: DEFAULT_A,
            t_window: DEFAULT_T,
            rng_seed: 0,
        }
    }

    pub fn with_sigma(mut self, sigma: f64) -> Self {
        self.sigma = sigma;
        self
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_a(mut self, a: f64) -> Self {
        self.a = a;
        self
    }

    pub fn with_t_window(mut self, t: f64) -> Self {
        self.t_window = t;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(DdmError::InvalidConfig(msg));
        if self.n == 0 {
            return bad("n must be at least 1".into());
        }
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return bad(format!(
                "sigma must be positive and finite, got {}",
                self.sigma
            ));
        }
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return bad(format!(
                "gamma must be positive and finite, got {}",
                self.gamma
            ));
        }
        if !(self.a.is_finite() && self.a > 0.0) {
            return bad(format!("a must be positive and finite, got {}", self.a));
        }
        if !(self.t_window > 0.0 && self.t_window <= 0.5) {
            return bad(format!("T must lie in (0, 1/2], got {}", self.t_window));
        }
        if !(self.alpha > 0.0 && self.alpha < 2.0 * self.t_window) {
            return bad(format!(
                "alpha must lie in (0, 2T) = (0, {}), got {}",
                2.0 * self.t_window,
                self.alpha
            ));
        }
        Ok(())
    }

    pub fn tau2(&self) -> f64 {
        self.sigma * self.sigma / (self.alpha + self.gamma)
    }

    pub fn lambda_n(&self) -> f64 {
        prior_inclusion(self.n, self.a)
    }

    /// `logit λₙ + ½·log(γ/(α+γ))`: the slab log-odds at `y = 0`.
    fn base_logit(&self) -> f64 {
        // logit λ = log λ − log(1 − λ), with log λ = −(1+a)·log n exactly.
        let log_lambda = -(1.0 + self.a) * (self.n as f64).ln();
        let logit_lambda = if self.n == 1 {
            f64::INFINITY
        } else {
            log_lambda - (-log_lambda.exp()).ln_1p()
        };
        logit_lambda + 0.5 * (self.gamma / (self.alpha + self.gamma)).ln()
    }
}

/// Prior inclusion probability `n^-(1+a)`.
pub fn prior_inclusion(n: usize, a: f64) -> f64 {
    (n as f64).powf(-(1.0 + a))
}

/// Closed credible interval `[lower, upper]` for one coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
    pub contains_atom_at_zero: bool,
}

impl Interval {
    pub fn length(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }
}

/// The fitted measure. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct DdmParams {
    mu: Vec<f64>,
    logit_phi: Vec<f64>,
    phi: Vec<f64>,
    tau2: f64,
    lambda_n: f64,
    config: ModelConfig,
}

/// Fit the measure in closed form.
pub fn fit(y: &[f64], config: &ModelConfig) -> Result<DdmParams> {
    config.validate()?;
    if y.len() != config.n {
        return Err(DdmError::DimensionMismatch {
            expected: config.n,
            actual: y.len(),
        });
    }
    if let Some((index, &value)) = y.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(DdmError::NonFinite { index, value });
    }

    let base = config.base_logit();
    let slope = config.alpha / (2.0 * config.sigma * config.sigma);
    let log_odds = |v: f64| base + slope * v * v;

    let (logit_phi, phi): (Vec<f64>, Vec<f64>) = if y.len() >= PARALLEL_FIT_MIN {
        y.par_iter()
            .map(|&v| {
                let l = log_odds(v);
                (l, logistic(l))
            })
            .unzip()
    } else {
        y.iter()
            .map(|&v| {
                let l = log_odds(v);
                (l, logistic(l))
            })
            .unzip()
    };

    Ok(DdmParams {
        mu: y.to_vec(),
        logit_phi,
        phi,
        tau2: config.tau2(),
        lambda_n: config.lambda_n(),
        config: *config,
    })
}

impl DdmParams {
    /// Build a measure from explicit components. The weights are stored
    /// exactly as given and their log-odds recomputed from them.
    pub fn from_weights(
        mu: Vec<f64>,
        phi: Vec<f64>,
        tau2: f64,
        config: ModelConfig,
    ) -> Result<Self> {
        if config.n == 0 {
            return Err(DdmError::InvalidConfig("n must be at least 1".into()));
        }
        for len in [mu.len(), phi.len()] {
            if len != config.n {
                return Err(DdmError::DimensionMismatch {
                    expected: config.n,
                    actual: len,
                });
            }
        }
        if let Some((index, &value)) = mu.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(DdmError::NonFinite { index, value });
        }
        if let Some(&p) = phi.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(DdmError::InvalidConfig(format!(
                "slab weight {p} outside [0, 1]"
            )));
        }
        if !(tau2.is_finite() && tau2 > 0.0) {
            return Err(DdmError::InvalidConfig(format!(
                "tau2 must be positive, got {tau2}"
            )));
        }
        let logit_phi = phi.iter().map(|&p| logit(p)).collect();
        Ok(Self {
            mu,
            logit_phi,
            phi,
            tau2,
            lambda_n: config.lambda_n(),
            config,
        })
    }

    pub fn n(&self) -> usize {
        self.mu.len()
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn logit_phi(&self) -> &[f64] {
        &self.logit_phi
    }

    pub fn tau2(&self) -> f64 {
        self.tau2
    }

    pub fn tau(&self) -> f64 {
        self.tau2.sqrt()
    }

    pub fn lambda_n(&self) -> f64 {
        self.lambda_n
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    /// `log φᵢ`.
    pub fn log_phi(&self, i: usize) -> f64 {
        -softplus(-self.logit_phi[i])
    }

    /// `log(1 − φᵢ)`, computed as `−log1p(exp(logit φᵢ))`.
    pub fn log_one_minus_phi(&self, i: usize) -> f64 {
        -softplus(self.logit_phi[i])
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.n() {
            Err(DdmError::IndexOutOfRange {
                index: i,
                n: self.n(),
            })
        } else {
            Ok(())
        }
    }

    /// CDF of coordinate `i`: `φ·Φ((t−μ)/τ) + (1−φ)·1{t ≥ 0}`.
    pub fn marginal_cdf(&self, i: usize, t: f64) -> Result<f64> {
        self.check_index(i)?;
        let phi = self.phi[i];
        let slab = if phi > 0.0 {
            phi * norm_cdf((t - self.mu[i]) / self.tau())
        } else {
            0.0
        };
        let atom = if t >= 0.0 { 1.0 - phi } else { 0.0 };
        Ok((slab + atom).min(1.0))
    }

    /// Generalized inverse `inf{t : F(t) ≥ p}` of the coordinate CDF, with
    /// every `p` that falls inside the jump at zero mapped to exactly 0.
    pub fn marginal_quantile(&self, i: usize, p: f64) -> Result<f64> {
        self.check_index(i)?;
        if !(p > 0.0 && p < 1.0) {
            return Err(DdmError::InvalidProbability(p));
        }
        let phi = self.phi[i];
        if phi == 0.0 {
            return Ok(0.0);
        }
        let (mu, tau) = (self.mu[i], self.tau());
        let below_zero = phi * norm_cdf(-mu / tau);
        let at_zero = below_zero + (1.0 - phi);
        // Rounding can push the normal-part probability to 1; keep it just
        // below and keep each branch on its own side of the atom.
        let below_one = 1.0 - f64::EPSILON / 2.0;
        let t = if p <= below_zero {
            (mu + tau * norm_quantile((p / phi).min(below_one))).min(0.0)
        } else if p <= at_zero {
            return Ok(0.0);
        } else {
            let target = ((p - (1.0 - phi)) / phi).min(below_one);
            (mu + tau * norm_quantile(target)).max(0.0)
        };
        if t.is_finite() {
            Ok(t)
        } else {
            Err(DdmError::Numeric(format!(
                "quantile {p} of coordinate {i} is not finite"
            )))
        }
    }

    /// `log δ(S) = Σ_{i∈S} log φᵢ + Σ_{i∉S} log(1−φᵢ)`.
    pub fn log_config_mass(&self, support: &[usize]) -> Result<f64> {
        let mut in_support = vec![false; self.n()];
        for &i in support {
            self.check_index(i)?;
            in_support[i] = true;
        }
        let terms: Vec<f64> = in_support
            .iter()
            .enumerate()
            .map(|(i, &inside)| {
                if inside {
                    self.log_phi(i)
                } else {
                    self.log_one_minus_phi(i)
                }
            })
            .collect();
        if terms.contains(&f64::NEG_INFINITY) {
            return Ok(f64::NEG_INFINITY);
        }
        Ok(compensated_sum(terms))
    }

    /// Fill `out` with one draw from the measure.
    fn draw_into(&self, rng: &mut ChaCha8Rng, out: &mut [f64]) {
        let tau = self.tau();
        for ((slot, &phi), &mu) in out.iter_mut().zip(&self.phi).zip(&self.mu) {
            let u: f64 = rng.random();
            *slot = if u < phi {
                let g: f64 = rng.sample(StandardNormal);
                mu + tau * g
            } else {
                0.0
            };
        }
    }

    /// Run `per_draw` on `m` draws, block by block. Block `b` uses the
    /// stream `derive_seed(seed, b)`, so output order and values do not
    /// depend on the thread pool.
    fn map_draws<T, F>(&self, m: usize, seed: u64, per_draw: F) -> Vec<T>
    where
        T: Send,
        F: Fn(&[f64]) -> T + Sync,
    {
        let blocks = m.div_ceil(DRAW_BLOCK);
        let per_block: Vec<Vec<T>> = (0..blocks)
            .into_par_iter()
            .map(|b| {
                let mut rng = stream(derive_seed(seed, b as u64));
                let count = DRAW_BLOCK.min(m - b * DRAW_BLOCK);
                let mut buf = vec![0.0; self.n()];
                (0..count)
                    .map(|_| {
                        self.draw_into(&mut rng, &mut buf);
                        per_draw(&buf)
                    })
                    .collect()
            })
            .collect();
        per_block.into_iter().flatten().collect()
    }

    /// `m` independent draws, each an `n`-vector.
    pub fn sample(&self, m: usize, seed: u64) -> Vec<Vec<f64>> {
        self.map_draws(m, seed, |draw| draw.to_vec())
    }

    /// Squared Euclidean distances from `center` of `m` draws. Uses the
    /// same streams as [`DdmParams::sample`].
    pub fn sample_sq_distances(&self, center: &[f64], m: usize, seed: u64) -> Result<Vec<f64>> {
        if center.len() != self.n() {
            return Err(DdmError::DimensionMismatch {
                expected: self.n(),
                actual: center.len(),
            });
        }
        Ok(self.map_draws(m, seed, |draw| {
            draw.iter()
                .zip(center)
                .map(|(x, c)| (x - c) * (x - c))
                .sum()
        }))
    }

    pub fn to_record(&self) -> ParamsRecord {
        ParamsRecord {
            n: self.n(),
            sigma: self.config.sigma,
            alpha: self.config.alpha,
            gamma: self.config.gamma,
            a: self.config.a,
            tau2: self.tau2,
            lambda_n: self.lambda_n,
            mu: self.mu.clone(),
            phi: self.phi.clone(),
        }
    }

    /// Rebuild a measure from its serialized record. The record carries no
    /// MGF window or seed; those are set to `T = 1/2` and 0.
    pub fn from_record(record: ParamsRecord) -> Result<Self> {
        let config = ModelConfig {
            n: record.n,
            sigma: record.sigma,
            alpha: record.alpha,
            gamma: record.gamma,
            a: record.a,
            t_window: GAUSSIAN_T,
            rng_seed: 0,
        };
        Self::from_weights(record.mu, record.phi, record.tau2, config)
    }
}

/// JSON form of a fitted measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamsRecord {
    pub n: usize,
    pub sigma: f64,
    pub alpha: f64,
    pub gamma: f64,
    pub a: f64,
    pub tau2: f64,
    pub lambda_n: f64,
    pub mu: Vec<f64>,
    pub phi: Vec<f64>,
}
