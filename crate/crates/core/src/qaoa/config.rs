use serde::{Deserialize, Serialize};

use super::optimizer::OptimizerKind;
use crate::circuit::Regime;
use crate::energy::Penalty;
use crate::sim::Backend;
use crate::{Error, Result};

/// When a trajectory ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StopMode {
    /// Stop at the first sampled valid configuration whose energy is within
    /// `tol` of `target_energy`; otherwise run the full iteration budget,
    /// restarting the optimizer from its best point whenever it settles.
    FirstGroundState { target_energy: f64, tol: f64 },
    /// Stop when the optimizer's trust region has shrunk to its floor.
    ParameterConvergence,
}

impl StopMode {
    pub fn ground_state(target_energy: f64) -> Self {
        StopMode::FirstGroundState {
            target_energy,
            tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaoaConfig {
    pub regime: Regime,
    pub p: usize,
    pub shots_per_iteration: usize,
    pub cvar_alpha: f64,
    pub max_iterations: usize,
    pub gamma_range: (f64, f64),
    pub beta_range: (f64, f64),
    pub seed: u64,
    pub backend: Backend,
    pub stop_mode: StopMode,
    #[serde(default)]
    pub optimizer: OptimizerKind,
    /// Penalty for [`Regime::Penalty`]; `None` picks the default weight.
    #[serde(default)]
    pub penalty: Option<Penalty>,
    /// Start the transverse-field regimes from a random valid configuration
    /// per trajectory instead of rotamer 0 everywhere.
    #[serde(default)]
    pub random_initial_configuration: bool,
}

/// Shots per iteration: `10·M` clamped to `[10, 100]` on the statevector,
/// 1000 with the MPS backend.
pub fn default_shots(num_qubits: usize, backend: &Backend) -> usize {
    match backend {
        Backend::Statevector => (10 * num_qubits).clamp(10, 100),
        Backend::Mps(_) => 1000,
    }
}

pub fn default_max_iterations(backend: &Backend) -> usize {
    match backend {
        Backend::Statevector => 500,
        Backend::Mps(_) => 2000,
    }
}

impl QaoaConfig {
    /// Defaults for an `M`-qubit problem.
    pub fn new(regime: Regime, p: usize, backend: Backend, num_qubits: usize, stop_mode: StopMode) -> Self {
        Self {
            regime,
            p,
            shots_per_iteration: default_shots(num_qubits, &backend),
            cvar_alpha: 0.2,
            max_iterations: default_max_iterations(&backend),
            gamma_range: (-0.1, 0.1),
            beta_range: (-1.0, 1.0),
            seed: 0,
            backend,
            stop_mode,
            optimizer: OptimizerKind::default(),
            penalty: None,
            random_initial_configuration: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.p == 0 {
            return bad("p must be at least 1".into());
        }
        if self.shots_per_iteration == 0 {
            return bad("shots_per_iteration must be at least 1".into());
        }
        if self.max_iterations == 0 {
            return bad("max_iterations must be at least 1".into());
        }
        if !(self.cvar_alpha > 0.0 && self.cvar_alpha <= 1.0) {
            return bad(format!("cvar_alpha {} is outside (0, 1]", self.cvar_alpha));
        }
        for (name, (lo, hi)) in [("gamma_range", self.gamma_range), ("beta_range", self.beta_range)] {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return bad(format!("{name} [{lo}, {hi}] is empty"));
            }
        }
        if let StopMode::FirstGroundState { target_energy, tol } = self.stop_mode {
            if !target_energy.is_finite() || !(tol >= 0.0) {
                return bad("ground-state target must be finite with tol ≥ 0".into());
            }
        }
        if let Backend::Mps(m) = self.backend {
            if m.max_bond == 0 || !(m.threshold >= 0.0) {
                return bad("MPS needs max_bond ≥ 1 and threshold ≥ 0".into());
            }
        }
        Ok(())
    }
}
