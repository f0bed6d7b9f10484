//! Circuit simulators behind one sampling contract.

mod mps;
mod statevector;

use serde::{Deserialize, Serialize};

pub use mps::{MpsConfig, MpsState};
pub use statevector::{CostTable, StateVector, MAX_STATEVECTOR_QUBITS};

use crate::circuit::Circuit;
use crate::energy::{Bitstring, BlockLayout, IsingHamiltonian};
use crate::rng::Rng;
use crate::Result;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Backend {
    #[default]
    Statevector,
    Mps(MpsConfig),
}

impl Backend {
    pub fn name(&self) -> &'static str {
        match self {
            Backend::Statevector => "statevector",
            Backend::Mps(_) => "mps",
        }
    }
}

/// Diagnostics of one simulated circuit. The statevector reports bond 0
/// and no truncation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SimStats {
    pub max_bond_reached: usize,
    pub discarded_weight: f64,
}

impl SimStats {
    /// Combine stats from several circuits of one run.
    pub fn merge(self, other: SimStats) -> SimStats {
        SimStats {
            max_bond_reached: self.max_bond_reached.max(other.max_bond_reached),
            discarded_weight: self.discarded_weight.max(other.discarded_weight),
        }
    }
}

/// Runs a circuit from `|0…0⟩` and draws measurement shots.
pub trait Sampler: Send + Sync {
    fn sample(&self, circuit: &Circuit, shots: usize, rng: &mut Rng) -> Result<(Vec<Bitstring>, SimStats)>;
}

/// Dense simulator; cost segments go through the precomputed energy table
/// when one is supplied.
#[derive(Debug, Clone, Default)]
pub struct StatevectorSampler {
    table: Option<CostTable>,
}

impl StatevectorSampler {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_cost_table(h: &IsingHamiltonian) -> Result<Self> {
        Ok(Self {
            table: Some(CostTable::new(h)?),
        })
    }

    pub fn run(&self, circuit: &Circuit) -> Result<StateVector> {
        let mut s = StateVector::zero(circuit.num_qubits())?;
        let table = self
            .table
            .as_ref()
            .filter(|t| t.num_qubits() == circuit.num_qubits());
        s.apply_circuit_with(circuit, table)?;
        Ok(s)
    }
}

impl Sampler for StatevectorSampler {
    fn sample(&self, circuit: &Circuit, shots: usize, rng: &mut Rng) -> Result<(Vec<Bitstring>, SimStats)> {
        let s = self.run(circuit)?;
        Ok((s.sample(shots, rng), SimStats::default()))
    }
}

#[derive(Debug, Clone, Default)]
pub struct MpsSampler {
    config: MpsConfig,
    layout: Option<BlockLayout>,
}

impl MpsSampler {
    pub fn new(config: MpsConfig) -> Self {
        Self { config, layout: None }
    }

    /// Use block exchanges for couplings between neighboring blocks.
    pub fn with_layout(mut self, layout: BlockLayout) -> Self {
        self.layout = Some(layout);
        self
    }

    pub fn run(&self, circuit: &Circuit) -> Result<MpsState> {
        let mut s = MpsState::zero(circuit.num_qubits(), self.config)?;
        s.apply_circuit(circuit, self.layout.as_ref())?;
        Ok(s)
    }
}

impl Sampler for MpsSampler {
    fn sample(&self, circuit: &Circuit, shots: usize, rng: &mut Rng) -> Result<(Vec<Bitstring>, SimStats)> {
        let mut s = self.run(circuit)?;
        let samples = s.sample(shots, rng)?;
        Ok((
            samples,
            SimStats {
                max_bond_reached: s.max_bond_reached(),
                discarded_weight: s.discarded_weight(),
            },
        ))
    }
}

/// Sampler for `backend`. The statevector gets an energy table for `h`.
pub fn sampler_for(backend: &Backend, h: &IsingHamiltonian) -> Result<Box<dyn Sampler>> {
    Ok(match backend {
        Backend::Statevector => Box::new(StatevectorSampler::with_cost_table(h)?),
        Backend::Mps(cfg) => Box::new(MpsSampler::new(*cfg).with_layout(h.layout().clone())),
    })
}
