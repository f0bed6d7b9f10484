//! Variational loop: parameter initialization, CVaR objective over samples,
//! gradient-free optimization with early stopping, and trajectory ensembles.

mod config;
mod cvar;
mod driver;
mod optimizer;
mod params;

pub use config::{default_max_iterations, default_shots, QaoaConfig, StopMode};
pub use cvar::{cvar, tail_size};
pub use driver::{optimize, run_ensemble, EnsembleResult, QaoaRunner};
pub use optimizer::{
    minimize_with_restarts, Cobyla, NelderMead, Objective, OptimizeResult, Optimizer, OptimizerKind,
};
pub use params::init_params;
