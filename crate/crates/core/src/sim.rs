//! Replicated simulation under `Yᵢ = θ⋆ᵢ + Zᵢ`.
//!
//! Replication `r` of an experiment with master seed `s` uses the stream
//! `derive_seed(s, r)` for everything it draws: child 0 for the data, child 1
//! for the Monte Carlo quantile radius. Replications run on the rayon pool,
//! are collected in index order and reduced sequentially with compensated
//! sums, so results are bit-identical for any thread count (the documented
//! tolerance of 1e-12 is therefore met with zero slack).

use crate::ball::{
    build_ball, BallMethod, DEFAULT_INFLATION_M, DEFAULT_MC_SAMPLES, DEFAULT_SIZE_L,
};
use crate::ddm::{fit, ModelConfig, GAUSSIAN_T};
use crate::error::{DdmError, Result};
use crate::inference::{
    marginal_interval, minimax_rate, posterior_mean, select, DEFAULT_THRESHOLD,
};
use crate::numeric::{compensated_mean, compensated_sum};
use crate::rng::{derive_seed, stream};
use rand::seq::index::sample as sample_indices;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Slab hyperparameters of the illustration template. With `α + γ = 1`
/// the slab has unit variance, so intervals for a clearly detected signal
/// have the usual `2 × 1.96` length. `α < 1` requires the Gaussian window.
pub const SECTION4_ALPHA: f64 = 0.95;
pub const SECTION4_GAMMA: f64 = 0.05;
pub const SECTION4_N: usize = 500;
/// Zero-based index of the varying eleventh coordinate.
pub const SECTION4_TARGET: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TruthPattern {
    /// `(7,7,7,7,7, 2,2,2,2,2, θ₁₁, 0, …, 0)`.
    Section4 {
        theta11: f64,
    },
    /// `s` coordinates of absolute value `magnitude` with random positions
    /// and signs, drawn once from `placement_seed`.
    SparseRandom {
        s: usize,
        magnitude: f64,
        #[serde(default)]
        placement_seed: u64,
    },
    Explicit {
        values: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthSpec {
    pub n: usize,
    pub pattern: TruthPattern,
}

impl TruthSpec {
    pub fn section4(n: usize, theta11: f64) -> Self {
        Self {
            n,
            pattern: TruthPattern::Section4 { theta11 },
        }
    }

    pub fn sparse_random(n: usize, s: usize, magnitude: f64, placement_seed: u64) -> Self {
        Self {
            n,
            pattern: TruthPattern::SparseRandom {
                s,
                magnitude,
                placement_seed,
            },
        }
    }

    /// The true mean vector.
    pub fn values(&self) -> Result<Vec<f64>> {
        let bad = |msg: String| Err(DdmError::InvalidExperiment(msg));
        if self.n == 0 {
            return bad("truth dimension must be at least 1".into());
        }
        match &self.pattern {
            TruthPattern::Section4 { theta11 } => {
                if self.n < 11 {
                    return bad(format!("section4 truth needs n >= 11, got {}", self.n));
                }
                if !theta11.is_finite() {
                    return bad(format!("theta11 must be finite, got {theta11}"));
                }
                let mut v = vec![0.0; self.n];
                v[..5].fill(7.0);
                v[5..10].fill(2.0);
                v[10] = *theta11;
                Ok(v)
            }
            TruthPattern::SparseRandom {
                s,
                magnitude,
                placement_seed,
            } => {
                if *s > self.n {
                    return bad(format!("sparsity {s} exceeds n = {}", self.n));
                }
                if !magnitude.is_finite() {
                    return bad(format!("magnitude must be finite, got {magnitude}"));
                }
                let mut rng = stream(*placement_seed);
                let mut idx = sample_indices(&mut rng, self.n, *s).into_vec();
                idx.sort_unstable();
                let mut v = vec![0.0; self.n];
                for i in idx {
                    v[i] = if rng.random::<bool>() {
                        *magnitude
                    } else {
                        -*magnitude
                    };
                }
                Ok(v)
            }
            TruthPattern::Explicit { values } => {
                if values.len() != self.n {
                    return bad(format!(
                        "explicit truth has {} values, expected {}",
                        values.len(),
                        self.n
                    ));
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return bad("explicit truth has non-finite values".into());
                }
                Ok(values.clone())
            }
        }
    }
}

/// Subgaussian error law; each variant carries its variance proxy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum ErrorSpec {
    Gaussian {
        sigma: f64,
    },
    /// Uniform on `[−b, b]`; variance proxy `b`.
    Uniform {
        half_width: f64,
    },
    /// `±scale` with equal probability; variance proxy `scale`.
    Rademacher {
        scale: f64,
    },
}

impl ErrorSpec {
    pub fn variance_proxy(&self) -> f64 {
        match *self {
            Self::Gaussian { sigma } => sigma,
            Self::Uniform { half_width } => half_width,
            Self::Rademacher { scale } => scale,
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            Self::Gaussian { sigma } => sigma * sigma,
            Self::Uniform { half_width } => half_width * half_width / 3.0,
            Self::Rademacher { scale } => scale * scale,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let scale = self.variance_proxy();
        if scale.is_finite() && scale >= 0.0 {
            Ok(())
        } else {
            Err(DdmError::InvalidExperiment(format!(
                "error scale must be finite and nonnegative, got {scale}"
            )))
        }
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        match *self {
            Self::Gaussian { sigma } => sigma * rng.sample::<f64, _>(StandardNormal),
            Self::Uniform { half_width } => half_width * (2.0 * rng.random::<f64>() - 1.0),
            Self::Rademacher { scale } => {
                if rng.random::<bool>() {
                    scale
                } else {
                    -scale
                }
            }
        }
    }
}

/// `n` iid errors from `errors`.
pub fn gen_noise(errors: &ErrorSpec, n: usize, seed: u64) -> Result<Vec<f64>> {
    errors.validate()?;
    let mut rng = stream(seed);
    Ok((0..n).map(|_| errors.draw(&mut rng)).collect())
}

/// `Y = θ⋆ + Z`.
pub fn gen_data(truth: &TruthSpec, errors: &ErrorSpec, seed: u64) -> Result<Vec<f64>> {
    let theta = truth.values()?;
    let noise = gen_noise(errors, theta.len(), seed)?;
    Ok(theta.iter().zip(noise).map(|(t, z)| t + z).collect())
}

fn default_zeta() -> f64 {
    0.05
}
fn default_replications() -> usize {
    500
}
fn default_ball_method() -> BallMethod {
    BallMethod::PlugIn
}
fn default_ball_m() -> f64 {
    DEFAULT_INFLATION_M
}
fn default_ball_l() -> f64 {
    DEFAULT_SIZE_L
}
fn default_mc_samples() -> usize {
    DEFAULT_MC_SAMPLES
}
fn default_threshold() -> f64 {
    DEFAULT_THRESHOLD
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub truth: TruthSpec,
    pub errors: ErrorSpec,
    pub model: ModelConfig,
    #[serde(default = "default_replications")]
    pub replications: usize,
    #[serde(default = "default_zeta")]
    pub zeta: f64,
    /// Coordinate whose marginal interval is tracked. `None` averages the
    /// per-replication coverage over all coordinates.
    #[serde(default)]
    pub target_index: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_ball_method")]
    pub ball_method: BallMethod,
    #[serde(rename = "ball_M", default = "default_ball_m")]
    pub ball_m: f64,
    /// Size constant: a replication is "within size" when `r̂² ≤ L·εₙ²(θ⋆)`.
    #[serde(rename = "ball_L", default = "default_ball_l")]
    pub ball_l: f64,
    #[serde(default = "default_mc_samples")]
    pub mc_samples: usize,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
}

impl ExperimentSpec {
    /// Spec with harness defaults for everything but truth and errors.
    pub fn new(truth: TruthSpec, errors: ErrorSpec, model: ModelConfig) -> Self {
        Self {
            truth,
            errors,
            model,
            replications: default_replications(),
            zeta: default_zeta(),
            target_index: None,
            seed: 0,
            ball_method: default_ball_method(),
            ball_m: default_ball_m(),
            ball_l: default_ball_l(),
            mc_samples: default_mc_samples(),
            threshold: default_threshold(),
        }
    }

    /// The illustration template: `n = 500`, standard normal errors,
    /// tracking the eleventh coordinate.
    pub fn section4(theta11: f64) -> Self {
        let model = ModelConfig::new(SECTION4_N)
            .with_alpha(SECTION4_ALPHA)
            .with_gamma(SECTION4_GAMMA)
            .with_t_window(GAUSSIAN_T);
        let mut spec = Self::new(
            TruthSpec::section4(SECTION4_N, theta11),
            ErrorSpec::Gaussian { sigma: 1.0 },
            model,
        );
        spec.target_index = Some(SECTION4_TARGET);
        spec
    }

    pub fn with_replications(mut self, r: usize) -> Self {
        self.replications = r;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_ball(mut self, method: BallMethod, m: f64) -> Self {
        self.ball_method = method;
        self.ball_m = m;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(DdmError::InvalidExperiment(msg));
        self.model.validate()?;
        self.errors.validate()?;
        if self.model.n != self.truth.n {
            return bad(format!(
                "model.n = {} differs from truth.n = {}",
                self.model.n, self.truth.n
            ));
        }
        if self.replications == 0 {
            return bad("replications must be at least 1".into());
        }
        if !(self.zeta > 0.0 && self.zeta < 0.5) {
            return Err(DdmError::InvalidZeta(self.zeta));
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(DdmError::InvalidThreshold(self.threshold));
        }
        if let Some(i) = self.target_index {
            if i >= self.truth.n {
                return Err(DdmError::IndexOutOfRange {
                    index: i,
                    n: self.truth.n,
                });
            }
        }
        if !(self.ball_m.is_finite() && self.ball_m > 0.0) {
            return bad(format!("ball_M must be positive, got {}", self.ball_m));
        }
        if !(self.ball_l.is_finite() && self.ball_l > 0.0) {
            return bad(format!("ball_L must be positive, got {}", self.ball_l));
        }
        Ok(())
    }
}

/// Aggregated statistics over replications.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub replications: usize,
    pub coverage_marginal: f64,
    pub coverage_marginal_se: f64,
    pub mean_length: f64,
    pub coverage_ball: f64,
    pub coverage_ball_se: f64,
    pub mean_radius: f64,
    /// Fraction of replications with `r̂² ≤ L·εₙ²(θ⋆)`.
    pub radius_within_l_rate: f64,
    /// `mean ‖θ̂ − θ⋆‖² / εₙ²(θ⋆)`, with `εₙ²` evaluated at `max(|S⋆|, 1)`.
    pub mean_sq_error_ratio: f64,
    pub selection_exact_rate: f64,
    pub mean_expected_dim: f64,
    pub mean_null_phi: f64,
}

impl ExperimentResult {
    pub const CSV_HEADER: &'static str = "replications,coverage_marginal,coverage_marginal_se,\
mean_length,coverage_ball,coverage_ball_se,mean_radius,radius_within_l_rate,\
mean_sq_error_ratio,selection_exact_rate,mean_expected_dim,mean_null_phi";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.replications,
            self.coverage_marginal,
            self.coverage_marginal_se,
            self.mean_length,
            self.coverage_ball,
            self.coverage_ball_se,
            self.mean_radius,
            self.radius_within_l_rate,
            self.mean_sq_error_ratio,
            self.selection_exact_rate,
            self.mean_expected_dim,
            self.mean_null_phi
        )
    }
}

/// Per-replication record.
#[derive(Debug, Clone, Copy)]
struct Replicate {
    covered: f64,
    length: f64,
    ball_covered: bool,
    radius: f64,
    within_l: bool,
    sq_error: f64,
    exact: bool,
    expected_dim: f64,
    null_phi: f64,
}

struct Truth {
    theta: Vec<f64>,
    support: Vec<usize>,
    is_null: Vec<bool>,
    eps2: f64,
}

fn replicate(spec: &ExperimentSpec, truth: &Truth, r: usize) -> Result<Replicate> {
    let rep_seed = derive_seed(spec.seed, r as u64);
    let noise = gen_noise(&spec.errors, truth.theta.len(), derive_seed(rep_seed, 0))?;
    let y: Vec<f64> = truth.theta.iter().zip(&noise).map(|(t, z)| t + z).collect();
    let params = fit(&y, &spec.model)?;
    let mean = posterior_mean(&params);

    let (covered, length) = match spec.target_index {
        Some(i) => {
            let iv = marginal_interval(&params, i, spec.zeta)?;
            (
                f64::from(u8::from(iv.contains(truth.theta[i]))),
                iv.length(),
            )
        }
        None => {
            let mut hits = 0usize;
            let mut lengths = Vec::with_capacity(truth.theta.len());
            for (i, &t) in truth.theta.iter().enumerate() {
                let iv = marginal_interval(&params, i, spec.zeta)?;
                hits += usize::from(iv.contains(t));
                lengths.push(iv.length());
            }
            (
                hits as f64 / truth.theta.len() as f64,
                compensated_mean(&lengths),
            )
        }
    };

    let ball = build_ball(
        &params,
        spec.ball_method,
        spec.zeta,
        spec.ball_m,
        spec.mc_samples,
        derive_seed(rep_seed, 1),
    )?;
    let ball_covered = ball.contains(&truth.theta)?;

    let sq_error = compensated_sum(
        mean.iter()
            .zip(&truth.theta)
            .map(|(m, t)| (m - t) * (m - t)),
    );
    let selection = select(&params, spec.threshold)?;
    let phi = params.phi();
    let nulls: Vec<f64> = phi
        .iter()
        .zip(&truth.is_null)
        .filter(|(_, &null)| null)
        .map(|(&p, _)| p)
        .collect();

    Ok(Replicate {
        covered,
        length,
        ball_covered,
        radius: ball.inflated_radius,
        within_l: ball.raw_radius * ball.raw_radius <= spec.ball_l * truth.eps2,
        sq_error,
        exact: selection.selected == truth.support,
        expected_dim: selection.expected_dim,
        null_phi: compensated_mean(&nulls),
    })
}

fn proportion_se(p: f64, reps: usize) -> f64 {
    (p * (1.0 - p) / reps as f64).sqrt()
}

fn sample_se(values: &[f64]) -> f64 {
    let k = values.len();
    if k < 2 {
        return 0.0;
    }
    let mean = compensated_mean(values);
    let ss = compensated_sum(values.iter().map(|v| (v - mean) * (v - mean)));
    (ss / (k - 1) as f64 / k as f64).sqrt()
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    spec.validate()?;
    let theta = spec.truth.values()?;
    let support: Vec<usize> = theta
        .iter()
        .enumerate()
        .filter(|(_, &t)| t != 0.0)
        .map(|(i, _)| i)
        .collect();
    let is_null = theta.iter().map(|&t| t == 0.0).collect();
    let eps2 = minimax_rate(theta.len(), support.len().max(1))?;
    let truth = Truth {
        theta,
        support,
        is_null,
        eps2,
    };

    let reps: Vec<Replicate> = (0..spec.replications)
        .into_par_iter()
        .map(|r| replicate(spec, &truth, r))
        .collect::<Result<_>>()?;

    let k = reps.len();
    let col = |f: fn(&Replicate) -> f64| -> Vec<f64> { reps.iter().map(f).collect() };
    let covered = col(|r| r.covered);
    let coverage_marginal = compensated_mean(&covered);
    let coverage_marginal_se = if spec.target_index.is_some() {
        proportion_se(coverage_marginal, k)
    } else {
        sample_se(&covered)
    };
    let coverage_ball = compensated_mean(&col(|r| f64::from(u8::from(r.ball_covered))));

    Ok(ExperimentResult {
        replications: k,
        coverage_marginal,
        coverage_marginal_se,
        mean_length: compensated_mean(&col(|r| r.length)),
        coverage_ball,
        coverage_ball_se: proportion_se(coverage_ball, k),
        mean_radius: compensated_mean(&col(|r| r.radius)),
        radius_within_l_rate: compensated_mean(&col(|r| f64::from(u8::from(r.within_l)))),
        mean_sq_error_ratio: compensated_mean(&col(|r| r.sq_error)) / truth.eps2,
        selection_exact_rate: compensated_mean(&col(|r| f64::from(u8::from(r.exact)))),
        mean_expected_dim: compensated_mean(&col(|r| r.expected_dim)),
        mean_null_phi: compensated_mean(&col(|r| r.null_phi)),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub theta11: f64,
    pub result: ExperimentResult,
}

pub const CURVE_CSV_HEADER: &str = "theta11,coverage,se,mean_length";

/// One experiment per `θ₁₁` grid value; every row reuses the base seed.
pub fn coverage_curve(base: &ExperimentSpec, grid: &[f64]) -> Result<Vec<CurveRow>> {
    if !matches!(base.truth.pattern, TruthPattern::Section4 { .. }) {
        return Err(DdmError::InvalidExperiment(
            "coverage curve needs a section4 truth pattern".into(),
        ));
    }
    grid.iter()
        .map(|&theta11| {
            let mut spec = base.clone();
            spec.truth.pattern = TruthPattern::Section4 { theta11 };
            Ok(CurveRow {
                theta11,
                result: run_experiment(&spec)?,
            })
        })
        .collect()
}

/// Plot-ready table: `theta11,coverage,se,mean_length`, `\n` line ends.
pub fn curve_csv(rows: &[CurveRow]) -> String {
    let mut out = String::from(CURVE_CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            row.theta11,
            row.result.coverage_marginal,
            row.result.coverage_marginal_se,
            row.result.mean_length
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn section4_truth_layout() {
        let v = TruthSpec::section4(20, 3.5).values().unwrap();
        assert_eq!(&v[..5], &[7.0; 5]);
        assert_eq!(&v[5..10], &[2.0; 5]);
        assert_eq!(v[10], 3.5);
        assert!(v[11..].iter().all(|&x| x == 0.0));
        assert!(TruthSpec::section4(10, 1.0).values().is_err());
    }

    #[test]
    fn sparse_random_truth() {
        let t = TruthSpec::sparse_random(100, 7, 4.0, 3);
        let v = t.values().unwrap();
        assert_eq!(v.iter().filter(|&&x| x != 0.0).count(), 7);
        assert!(v.iter().all(|&x| x == 0.0 || x.abs() == 4.0));
        assert_eq!(v, t.values().unwrap());
        assert!(TruthSpec::sparse_random(5, 6, 1.0, 0).values().is_err());
    }

    #[test]
    fn explicit_truth_checks_length() {
        let t = TruthSpec {
            n: 3,
            pattern: TruthPattern::Explicit {
                values: vec![1.0, 2.0],
            },
        };
        assert!(t.values().is_err());
    }

    #[test]
    fn zero_scale_reproduces_truth() {
        let t = TruthSpec::section4(30, 7.0);
        for e in [
            ErrorSpec::Gaussian { sigma: 0.0 },
            ErrorSpec::Uniform { half_width: 0.0 },
            ErrorSpec::Rademacher { scale: 0.0 },
        ] {
            assert_eq!(gen_data(&t, &e, 1).unwrap(), t.values().unwrap());
        }
    }

    #[test]
    fn variance_proxy_dominates_sd() {
        for e in [
            ErrorSpec::Gaussian { sigma: 1.5 },
            ErrorSpec::Uniform { half_width: 2.0 },
            ErrorSpec::Rademacher { scale: 0.7 },
        ] {
            assert!(e.variance_proxy() >= e.variance().sqrt());
        }
        assert!(ErrorSpec::Gaussian { sigma: -1.0 }.validate().is_err());
    }

    #[test]
    fn gaussian_noise_moments() {
        let n = 100_000;
        let z = gen_noise(&ErrorSpec::Gaussian { sigma: 1.0 }, n, 77).unwrap();
        let mean = compensated_mean(&z);
        let var = compensated_sum(z.iter().map(|v| (v - mean) * (v - mean))) / (n - 1) as f64;
        assert!(mean.abs() < 4.0 / (n as f64).sqrt());
        assert!((var - 1.0).abs() < 0.05);
    }

    #[test]
    fn single_noiseless_replication() {
        let mut spec = ExperimentSpec::section4(7.0).with_replications(1);
        spec.errors = ErrorSpec::Gaussian { sigma: 0.0 };
        let theta = spec.truth.values().unwrap();
        let params = fit(&theta, &spec.model).unwrap();
        for i in 0..5 {
            assert!(params.phi()[i] > 0.999);
        }
        let sel = select(&params, 0.5).unwrap();
        assert!((0..5).all(|i| sel.selected.contains(&i)));
        let res = run_experiment(&spec).unwrap();
        assert_eq!(res.replications, 1);
        assert_eq!(res.coverage_marginal, 1.0);
    }

    #[test]
    fn spec_validation() {
        let mut spec = ExperimentSpec::section4(1.0);
        spec.model.n = 400;
        assert!(run_experiment(&spec).is_err());
        let spec = ExperimentSpec::section4(1.0).with_replications(0);
        assert!(run_experiment(&spec).is_err());
        let mut spec = ExperimentSpec::section4(1.0);
        spec.target_index = Some(500);
        assert!(matches!(
            run_experiment(&spec),
            Err(DdmError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn proportions_in_unit_interval() {
        let spec = ExperimentSpec::new(
            TruthSpec::sparse_random(200, 4, 8.0, 1),
            ErrorSpec::Uniform { half_width: 1.0 },
            ModelConfig::new(200),
        )
        .with_replications(30);
        let r = run_experiment(&spec).unwrap();
        for p in [
            r.coverage_marginal,
            r.coverage_ball,
            r.radius_within_l_rate,
            r.selection_exact_rate,
        ] {
            assert!((0.0..=1.0).contains(&p));
        }
        assert_eq!(
            ExperimentResult::CSV_HEADER.split(',').count(),
            r.csv_row().split(',').count()
        );
    }

    #[test]
    fn curve_requires_section4() {
        let spec = ExperimentSpec::new(
            TruthSpec::sparse_random(50, 2, 5.0, 0),
            ErrorSpec::Gaussian { sigma: 1.0 },
            ModelConfig::new(50),
        );
        assert!(coverage_curve(&spec, &[1.0]).is_err());
    }

    #[test]
    fn curve_table_shape() {
        let base = ExperimentSpec::section4(0.0).with_replications(20);
        let rows = coverage_curve(&base, &[0.0, 2.0, 9.0]).unwrap();
        let csv = curve_csv(&rows);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CURVE_CSV_HEADER);
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("0,"));
    }

    #[test]
    fn spec_json_defaults() {
        let json = r#"{
            "truth": {"n": 500, "pattern": {"kind": "section4", "theta11": 7.0}},
            "errors": {"law": "gaussian", "sigma": 1.0},
            "model": {"n": 500, "alpha": 0.95, "gamma": 0.05, "T": 0.5},
            "target_index": 10,
            "seed": 5
        }"#;
        let spec: ExperimentSpec = serde_json::from_str(json).unwrap();
        assert_eq!(spec.replications, 500);
        assert_eq!(spec.ball_method, BallMethod::PlugIn);
        assert_eq!(spec.model.a, 1.0);
        assert_eq!(spec.ball_m, 1.0);
        spec.validate().unwrap();
        let back: ExperimentSpec =
            serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(back, spec);
    }
}
