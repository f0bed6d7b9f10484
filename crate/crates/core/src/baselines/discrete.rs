//! Metropolis annealing over valid configurations. A move changes the
//! rotamer of one residue, which keeps every block one-hot.

use std::ops::ControlFlow;
use std::time::Instant;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::sa::{GroundTarget, Tally};
use crate::circuit::random_configuration;
use crate::energy::RotamerProblem;
use crate::record::{Method, RunRecord};
use crate::rng::{stream, trajectory_seed, Stream};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DiscreteSaConfig {
    /// Sweeps of `N` proposed moves each.
    pub max_iterations: usize,
    /// Start temperature; `None` uses the largest absolute table entry.
    pub initial_temperature: Option<f64>,
    /// Final temperature as a fraction of the start.
    pub final_ratio: f64,
    pub seed: u64,
}

impl Default for DiscreteSaConfig {
    fn default() -> Self {
        Self {
            max_iterations: 1000,
            initial_temperature: None,
            final_ratio: 1e-3,
            seed: 0,
        }
    }
}

fn energy_scale(problem: &RotamerProblem) -> f64 {
    let own = problem
        .self_energies()
        .iter()
        .flatten()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let pairs = problem.pair_tables().fold(0.0f64, |m, (_, t)| m.max(t.max_abs()));
    own.max(pairs).max(1e-12)
}

pub fn discrete_anneal(
    problem: &RotamerProblem,
    config: &DiscreteSaConfig,
    target: Option<GroundTarget>,
    trajectory_id: u64,
) -> Result<RunRecord> {
    if config.max_iterations == 0 || !(config.final_ratio > 0.0 && config.final_ratio <= 1.0) {
        return Err(Error::InvalidConfig("need max_iterations ≥ 1 and final_ratio in (0, 1]".into()));
    }
    let start = Instant::now();
    let seed = trajectory_seed(config.seed, trajectory_id);
    let mut rng = stream(seed, Stream::Annealing);
    let t0 = config.initial_temperature.unwrap_or_else(|| energy_scale(problem));
    if !(t0 > 0.0) {
        return Err(Error::InvalidConfig(format!("initial temperature {t0} must be positive")));
    }
    let decay = if config.max_iterations > 1 {
        config.final_ratio.powf(1.0 / (config.max_iterations - 1) as f64)
    } else {
        1.0
    };
    let sizes = problem.rotamers_per_residue().to_vec();
    let movable: Vec<usize> = (0..sizes.len()).filter(|&i| sizes[i] > 1).collect();
    let mut tally = Tally::new(problem, target);

    let mut config_now = random_configuration(problem.layout(), &mut stream(seed, Stream::InitialState));
    let mut e_now = problem.energy(&config_now);
    let observe = |tally: &mut Tally, c: &[usize]| {
        tally.evaluations += 1;
        let bits = problem.encode(c).expect("configuration in range");
        tally.observe_valid(bits, c.to_vec())
    };
    let mut iterations = 0u64;
    if observe(&mut tally, &config_now).is_continue() && !movable.is_empty() {
        let mut t = t0;
        'sweeps: for _ in 0..config.max_iterations {
            iterations += 1;
            for _ in 0..sizes.len() {
                let i = movable[rng.gen_range(0..movable.len())];
                let mut r = rng.gen_range(0..sizes[i] - 1);
                if r >= config_now[i] {
                    r += 1;
                }
                let old = config_now[i];
                config_now[i] = r;
                let e = problem.energy(&config_now);
                if let ControlFlow::Break(()) = observe(&mut tally, &config_now) {
                    break 'sweeps;
                }
                if e <= e_now || rng.gen::<f64>() < (-(e - e_now) / t).exp() {
                    e_now = e;
                } else {
                    config_now[i] = old;
                }
            }
            tally.next_iteration();
            t *= decay;
        }
    }
    let iterations = if tally.hit.is_some() { tally.iteration } else { iterations };
    Ok(tally.into_record(Method::SaDiscrete, seed, trajectory_id, iterations, start))
}
