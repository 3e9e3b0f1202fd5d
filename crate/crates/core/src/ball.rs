//! Credible balls `{θ : ‖θ − θ̂‖ ≤ M·gₙ·r̂}` around the mean of the measure.
//!
//! Two radii are supported. The quantile radius is the `1 − ζ` quantile of
//! `‖θ − θ̂‖` under the measure, estimated by Monte Carlo with the upper
//! nearest-rank rule and inflated by `gₙ = log(e·n)`. The plug-in radius is
//! `(|Ŝ|·log(e·n/|Ŝ|))^½` with `Ŝ = {i : φᵢ > ½}` and `gₙ = 1`.

use crate::ddm::DdmParams;
use crate::error::{DdmError, Result};
use crate::inference::{minimax_rate, posterior_mean, select, DEFAULT_THRESHOLD};
use serde::{Deserialize, Serialize};

pub const DEFAULT_MC_SAMPLES: usize = 10_000;
pub const MIN_MC_SAMPLES: usize = 100;
pub const DEFAULT_INFLATION_M: f64 = 1.0;
pub const DEFAULT_SIZE_L: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BallMethod {
    Quantile,
    PlugIn,
}

impl BallMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Quantile => "quantile",
            Self::PlugIn => "plug_in",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CredibleBall {
    pub center: Vec<f64>,
    pub raw_radius: f64,
    pub inflated_radius: f64,
    pub method: BallMethod,
    pub zeta: f64,
    pub inflation_m: f64,
    pub g_n: f64,
    pub mc_samples: Option<usize>,
    pub seed: Option<u64>,
}

/// Serialized summary of a ball (the center is written separately).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallRecord {
    pub method: BallMethod,
    pub zeta: f64,
    #[serde(rename = "M")]
    pub inflation_m: f64,
    pub g_n: f64,
    pub raw_radius: f64,
    pub inflated_radius: f64,
    pub mc_samples: Option<usize>,
    pub seed: Option<u64>,
}

fn check_zeta(zeta: f64) -> Result<()> {
    if zeta > 0.0 && zeta < 0.5 {
        Ok(())
    } else {
        Err(DdmError::InvalidZeta(zeta))
    }
}

/// 1-based rank `⌈(1 − ζ)·m⌉` of the upper nearest-rank quantile.
pub fn nearest_rank(zeta: f64, m: usize) -> usize {
    // The slack absorbs representation error in (1 − ζ)·m when it is an
    // integer mathematically.
    let k = ((1.0 - zeta) * m as f64 - 1e-9).ceil() as usize;
    k.clamp(1, m)
}

/// Monte Carlo quantile radius around the mean of the measure.
pub fn quantile_radius(params: &DdmParams, zeta: f64, m: usize, seed: u64) -> Result<f64> {
    check_zeta(zeta)?;
    if m < MIN_MC_SAMPLES {
        return Err(DdmError::TooFewSamples {
            min: MIN_MC_SAMPLES,
            got: m,
        });
    }
    let center = posterior_mean(params);
    let mut dist2 = params.sample_sq_distances(&center, m, seed)?;
    let k = nearest_rank(zeta, m);
    let (_, kth, _) = dist2.select_nth_unstable_by(k - 1, f64::total_cmp);
    Ok(kth.sqrt())
}

/// Squared plug-in radius `s·log(e·n/s)` with `s = max(|Ŝ|, 1)`.
pub fn plug_in_radius_sq(params: &DdmParams) -> f64 {
    let s = select(params, DEFAULT_THRESHOLD)
        .map(|sel| sel.size())
        .unwrap_or(0)
        .max(1);
    minimax_rate(params.n(), s).expect("selection size never exceeds n")
}

pub fn plug_in_radius(params: &DdmParams) -> f64 {
    plug_in_radius_sq(params).sqrt()
}

/// Inflation factor `gₙ`.
pub fn inflation_factor(method: BallMethod, n: usize) -> f64 {
    match method {
        BallMethod::Quantile => 1.0 + (n as f64).ln(),
        BallMethod::PlugIn => 1.0,
    }
}

pub fn build_ball(
    params: &DdmParams,
    method: BallMethod,
    zeta: f64,
    inflation_m: f64,
    mc_samples: usize,
    seed: u64,
) -> Result<CredibleBall> {
    check_zeta(zeta)?;
    if !(inflation_m.is_finite() && inflation_m > 0.0) {
        return Err(DdmError::InvalidConfig(format!(
            "inflation constant M must be positive, got {inflation_m}"
        )));
    }
    let (raw_radius, mc, used_seed) = match method {
        BallMethod::Quantile => (
            quantile_radius(params, zeta, mc_samples, seed)?,
            Some(mc_samples),
            Some(seed),
        ),
        BallMethod::PlugIn => (plug_in_radius(params), None, None),
    };
    let g_n = inflation_factor(method, params.n());
    Ok(CredibleBall {
        center: posterior_mean(params),
        raw_radius,
        inflated_radius: inflation_m * g_n * raw_radius,
        method,
        zeta,
        inflation_m,
        g_n,
        mc_samples: mc,
        seed: used_seed,
    })
}

impl CredibleBall {
    pub fn n(&self) -> usize {
        self.center.len()
    }

    /// Euclidean distance from the center.
    pub fn distance(&self, theta: &[f64]) -> Result<f64> {
        if theta.len() != self.n() {
            return Err(DdmError::DimensionMismatch {
                expected: self.n(),
                actual: theta.len(),
            });
        }
        Ok(theta
            .iter()
            .zip(&self.center)
            .map(|(t, c)| (t - c) * (t - c))
            .sum::<f64>()
            .sqrt())
    }

    /// `‖θ − center‖ ≤ inflated_radius`, boundary included.
    pub fn contains(&self, theta: &[f64]) -> Result<bool> {
        Ok(self.distance(theta)? <= self.inflated_radius)
    }

    pub fn to_record(&self) -> BallRecord {
        BallRecord {
            method: self.method,
            zeta: self.zeta,
            inflation_m: self.inflation_m,
            g_n: self.g_n,
            raw_radius: self.raw_radius,
            inflated_radius: self.inflated_radius,
            mc_samples: self.mc_samples,
            seed: self.seed,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ddm::{fit, ModelConfig};

    fn weights(mu: Vec<f64>, phi: Vec<f64>) -> DdmParams {
        let n = mu.len();
        DdmParams::from_weights(mu, phi, 1.0, ModelConfig::new(n)).unwrap()
    }

    fn fitted(n: usize, signals: &[(usize, f64)]) -> DdmParams {
        let mut y: Vec<f64> = (0..n)
            .map(|i| ((i * 7919) % 200) as f64 / 100.0 - 1.0)
            .collect();
        for &(i, v) in signals {
            y[i] = v;
        }
        fit(&y, &ModelConfig::new(n)).unwrap()
    }

    #[test]
    fn point_mass_has_zero_radius() {
        let p = weights(vec![2.0; 6], vec![0.0; 6]);
        assert_eq!(quantile_radius(&p, 0.05, 500, 3).unwrap(), 0.0);
    }

    #[test]
    fn single_normal_coordinate_radius() {
        let p = weights(vec![0.0], vec![1.0]);
        let r = quantile_radius(&p, 0.05, 1_000_000, 17).unwrap();
        assert!((r - 1.959_963_984_540_054).abs() < 0.02, "r = {r}");
    }

    #[test]
    fn quantile_radius_errors() {
        let p = weights(vec![0.0], vec![1.0]);
        assert!(matches!(
            quantile_radius(&p, 0.5, 1000, 1),
            Err(DdmError::InvalidZeta(_))
        ));
        assert!(matches!(
            quantile_radius(&p, 0.05, 99, 1),
            Err(DdmError::TooFewSamples { min: 100, got: 99 })
        ));
    }

    #[test]
    fn nearest_rank_guarantee_on_generating_draws() {
        let p = fitted(60, &[(0, 9.0), (1, -8.0), (2, 4.5)]);
        let center = posterior_mean(&p);
        for (zeta, m) in [(0.05, 1000), (0.1, 777), (0.2, 100), (0.01, 2500)] {
            let r = quantile_radius(&p, zeta, m, 99).unwrap();
            let d = p.sample_sq_distances(&center, m, 99).unwrap();
            let inside = d.iter().filter(|&&x| x.sqrt() <= r).count();
            assert!(inside as f64 / m as f64 >= 1.0 - zeta - 1e-12);
        }
    }

    #[test]
    fn fresh_draw_mass_meets_binomial_bound() {
        let p = fitted(40, &[(3, 7.0), (4, 5.0)]);
        let (zeta, m) = (0.05, 20_000);
        let r = quantile_radius(&p, zeta, m, 1).unwrap();
        let d = p.sample_sq_distances(&posterior_mean(&p), m, 2).unwrap();
        let mass = d.iter().filter(|&&x| x.sqrt() <= r).count() as f64 / m as f64;
        assert!(mass >= 1.0 - zeta - 3.0 * (zeta * (1.0 - zeta) / m as f64).sqrt());
    }

    #[test]
    fn quantile_radius_nonincreasing_in_zeta() {
        let p = fitted(50, &[(0, 6.0), (10, -6.5)]);
        let radii: Vec<f64> = [0.01, 0.02, 0.05, 0.1, 0.2, 0.3, 0.45]
            .iter()
            .map(|&z| quantile_radius(&p, z, 4000, 5).unwrap())
            .collect();
        assert!(radii.windows(2).all(|w| w[1] <= w[0]), "{radii:?}");
        assert_eq!(quantile_radius(&p, 0.05, 4000, 5).unwrap(), radii[2]);
    }

    #[test]
    fn plug_in_examples() {
        let full = weights(vec![1.0; 9], vec![0.9; 9]);
        assert!((plug_in_radius(&full) - 3.0).abs() < 1e-15);

        let mut phi = vec![0.0; 500];
        phi[..11].iter_mut().for_each(|p| *p = 0.99);
        let p = weights(vec![1.0; 500], phi);
        assert!((plug_in_radius(&p) - 7.279_000_005_623_165).abs() < 1e-12);
        assert_eq!(plug_in_radius_sq(&p), minimax_rate(500, 11).unwrap());

        let empty = weights(vec![0.0; 500], vec![0.1; 500]);
        assert!((plug_in_radius(&empty) - 2.686_002_252_125_301_5).abs() < 1e-12);
        assert_eq!(plug_in_radius_sq(&empty), minimax_rate(500, 1).unwrap());
    }

    #[test]
    fn build_ball_factors() {
        let p = fitted(500, &[(0, 9.0), (1, 9.0)]);
        let b = build_ball(&p, BallMethod::PlugIn, 0.05, 1.0, 0, 0).unwrap();
        assert_eq!(b.inflated_radius, b.raw_radius);
        assert_eq!(b.g_n, 1.0);
        assert_eq!(b.mc_samples, None);

        let q = build_ball(&p, BallMethod::Quantile, 0.05, 1.0, 2000, 4).unwrap();
        assert!((q.g_n - 7.214_608_098_422_192).abs() < 1e-12);
        assert_eq!(q.inflated_radius, q.g_n * q.raw_radius);
        assert_eq!(q.center, posterior_mean(&p));
        assert_eq!(q.mc_samples, Some(2000));

        let m2 = build_ball(&p, BallMethod::Quantile, 0.05, 2.5, 2000, 4).unwrap();
        assert_eq!(m2.inflated_radius, 2.5 * q.g_n * q.raw_radius);
        assert!(build_ball(&p, BallMethod::PlugIn, 0.05, 0.0, 0, 0).is_err());
        assert!(build_ball(&p, BallMethod::PlugIn, 0.6, 1.0, 0, 0).is_err());
    }

    fn ball_at(center: Vec<f64>, r: f64) -> CredibleBall {
        CredibleBall {
            center,
            raw_radius: r,
            inflated_radius: r,
            method: BallMethod::PlugIn,
            zeta: 0.05,
            inflation_m: 1.0,
            g_n: 1.0,
            mc_samples: None,
            seed: None,
        }
    }

    #[test]
    fn membership() {
        let b = ball_at(vec![1.0, 2.0], 0.0);
        assert!(b.contains(&[1.0, 2.0]).unwrap());
        assert!(!b.contains(&[1.0, 2.000001]).unwrap());
        assert!(ball_at(vec![0.0, 0.0], 5.0).contains(&[3.0, 4.0]).unwrap());
        assert!(matches!(
            b.contains(&[1.0]),
            Err(DdmError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn record_serializes_expected_keys() {
        let p = fitted(20, &[(0, 9.0)]);
        let b = build_ball(&p, BallMethod::Quantile, 0.1, 1.0, 200, 8).unwrap();
        let v = serde_json::to_value(b.to_record()).unwrap();
        for key in [
            "method",
            "zeta",
            "M",
            "g_n",
            "raw_radius",
            "inflated_radius",
            "mc_samples",
            "seed",
        ] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        assert_eq!(v["method"], "quantile");
    }
}
