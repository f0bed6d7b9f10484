//! Exhaustive search over valid configurations.

use serde::{Deserialize, Serialize};

use crate::energy::RotamerProblem;
use crate::{Error, Result};

/// Default limit on the number of configurations enumerated.
pub const DEFAULT_ENUMERATION_CAP: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub ground_energy: f64,
    /// Every configuration whose energy equals `ground_energy` exactly.
    pub ground_configs: Vec<Vec<usize>>,
    pub evaluations: u64,
}

/// Minimum energy and all minimizers over the `Π n_i` valid configurations.
pub fn brute_force(problem: &RotamerProblem) -> Result<OracleResult> {
    brute_force_capped(problem, DEFAULT_ENUMERATION_CAP)
}

pub fn brute_force_capped(problem: &RotamerProblem, cap: u64) -> Result<OracleResult> {
    let count = problem.search_space_size();
    if count > cap as f64 {
        return Err(Error::EnumerationCap { count, cap });
    }
    let sizes = problem.rotamers_per_residue();
    let mut config = vec![0usize; sizes.len()];
    let mut best = f64::INFINITY;
    let mut ties: Vec<Vec<usize>> = Vec::new();
    let mut evaluations = 0u64;
    loop {
        let e = problem.energy(&config);
        evaluations += 1;
        if e < best {
            best = e;
            ties.clear();
            ties.push(config.clone());
        } else if e == best {
            ties.push(config.clone());
        }
        // Odometer step, residue 0 fastest.
        let mut i = 0;
        loop {
            if i == config.len() {
                return Ok(OracleResult {
                    ground_energy: best,
                    ground_configs: ties,
                    evaluations,
                });
            }
            config[i] += 1;
            if config[i] < sizes[i] {
                break;
            }
            config[i] = 0;
            i += 1;
        }
    }
}
