//! Benchmark orchestration for the rotamer-packing solvers: experiment
//! plans, resumable runs, log-linear cost fits, clock-normalized crossover
//! estimates and report files.

pub mod crossover;
pub mod fit;
pub mod format;
pub mod plan;
pub mod report;
pub mod runner;

pub use crossover::{estimate_crossover, Clocks, Crossover, CrossoverEstimate};
pub use fit::{fit_scaling, ScalingFit, ScalingPoint};
pub use plan::Plan;
pub use report::emit_reports;
pub use runner::{run_experiment, workers_from_env, Dataset};

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("plan: {0}")]
    Plan(String),

    #[error("fit: {0}")]
    Fit(String),

    #[error(transparent)]
    Core(#[from] rotaq_core::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}

pub type Result<T, E = BenchError> = std::result::Result<T, E>;
