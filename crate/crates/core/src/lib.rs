//! Inference for sparse normal means with a closed-form data-dependent
//! measure: fitting, point estimation, structure selection, marginal
//! credible intervals, credible balls, and a replication harness for
//! frequentist checks.

pub mod ball;
pub mod cli;
pub mod ddm;
pub mod error;
pub mod inference;
pub mod numeric;
pub mod rng;
pub mod sim;

pub use ball::{
    build_ball, plug_in_radius, plug_in_radius_sq, quantile_radius, BallMethod, CredibleBall,
};
pub use ddm::{fit, prior_inclusion, DdmParams, Interval, ModelConfig, ParamsRecord};
pub use error::{DdmError, Result};
pub use inference::{
    beta_min, marginal_interval, minimax_rate, posterior_mean, select, SelectionResult,
};
pub use sim::{
    coverage_curve, gen_data, run_experiment, ErrorSpec, ExperimentResult, ExperimentSpec,
    TruthSpec,
};
