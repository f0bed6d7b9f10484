use std::f64::consts::FRAC_PI_4;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::gate::Gate;
use super::ir::{Circuit, SegmentKind};
use crate::energy::{
    build_qubo, qubo_to_ising, BlockLayout, IsingHamiltonian, Penalty, RotamerProblem,
};
use crate::{Error, Result};

/// How the one-rotamer-per-residue constraint is handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Unpenalized cost, transverse-field mixer, invalid samples discarded.
    Baseline,
    /// Penalized cost, transverse-field mixer.
    Penalty,
    /// Unpenalized cost, weight-preserving ring-XY mixer and W-like start state.
    Xy,
}

impl Regime {
    pub const ALL: [Regime; 3] = [Regime::Xy, Regime::Penalty, Regime::Baseline];

    pub fn name(self) -> &'static str {
        match self {
            Regime::Baseline => "baseline",
            Regime::Penalty => "penalty",
            Regime::Xy => "xy",
        }
    }

    /// Label used in depth tables.
    pub fn method_label(self) -> &'static str {
        match self {
            Regime::Baseline => "Baseline",
            Regime::Penalty => "pen-QAOA",
            Regime::Xy => "XY-QAOA",
        }
    }

    pub fn uses_penalty(self) -> bool {
        self == Regime::Penalty
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "baseline" => Ok(Regime::Baseline),
            "penalty" | "pen" | "pen-qaoa" => Ok(Regime::Penalty),
            "xy" | "xy-qaoa" => Ok(Regime::Xy),
            other => Err(Error::InvalidConfig(format!("unknown regime {other:?}"))),
        }
    }
}

/// Ising cost Hamiltonian for a regime. `penalty` is used only by
/// [`Regime::Penalty`], defaulting to [`Penalty::default_for`].
pub fn cost_hamiltonian(
    problem: &RotamerProblem,
    regime: Regime,
    penalty: Option<Penalty>,
) -> Result<IsingHamiltonian> {
    let penalty = match regime {
        Regime::Penalty => Some(penalty.unwrap_or_else(|| Penalty::default_for(problem))),
        Regime::Baseline | Regime::Xy => None,
    };
    qubo_to_ising(&build_qubo(problem, penalty)?)
}

/// Everything needed to assemble a QAOA circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct AnsatzSpec {
    regime: Regime,
    p: usize,
    hamiltonian: IsingHamiltonian,
    initial_configuration: Option<Vec<usize>>,
}

impl AnsatzSpec {
    pub fn new(regime: Regime, p: usize, hamiltonian: IsingHamiltonian) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidConfig("ansatz depth p must be at least 1".into()));
        }
        match (regime, hamiltonian.penalty()) {
            (Regime::Xy, Some(_)) | (Regime::Baseline, Some(_)) => {
                return Err(Error::InvalidConfig(format!(
                    "{regime} regime requires an unpenalized cost Hamiltonian"
                )))
            }
            (Regime::Penalty, None) => {
                return Err(Error::InvalidConfig(
                    "penalty regime requires a penalized cost Hamiltonian".into(),
                ))
            }
            _ => {}
        }
        if regime == Regime::Xy {
            check_rings(hamiltonian.layout())?;
        }
        Ok(Self {
            regime,
            p,
            hamiltonian,
            initial_configuration: None,
        })
    }

    /// Start state for the transverse-field regimes (default: rotamer 0 of
    /// every residue). Ignored by the XY regime.
    pub fn with_initial_configuration(mut self, config: Vec<usize>) -> Result<Self> {
        self.layout().check_configuration(&config)?;
        self.initial_configuration = Some(config);
        Ok(self)
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn num_params(&self) -> usize {
        2 * self.p
    }

    pub fn hamiltonian(&self) -> &IsingHamiltonian {
        &self.hamiltonian
    }

    pub fn layout(&self) -> &BlockLayout {
        self.hamiltonian.layout()
    }

    pub fn num_qubits(&self) -> usize {
        self.hamiltonian.num_spins()
    }

    pub fn initial_configuration(&self) -> Option<&[usize]> {
        self.initial_configuration.as_deref()
    }
}

fn check_rings(layout: &BlockLayout) -> Result<()> {
    if let Some(b) = layout.sizes().iter().position(|&n| n < 2) {
        return Err(Error::InvalidConfig(format!(
            "residue {b} has {} rotamer(s); the XY mixer needs at least 2 per residue",
            layout.size(b)
        )));
    }
    Ok(())
}

/// `exp(-iγ H_C)` as one RZZ per nonzero coupling and one RZ per nonzero
/// field. The constant contributes only a global phase.
pub fn build_cost_unitary(h: &IsingHamiltonian, gamma: f64) -> Circuit {
    cost_fragment(h, gamma, None)
}

fn cost_fragment(h: &IsingHamiltonian, gamma: f64, layer: Option<usize>) -> Circuit {
    let mut gates: Vec<Gate> = h
        .nonzero_couplings()
        .into_iter()
        .map(|(a, b, j)| Gate::Rzz { a, b, theta: 2.0 * gamma * j })
        .collect();
    // H carries -h_i Z_i, so the rotation angle is -2γh_i.
    gates.extend(
        h.nonzero_fields()
            .into_iter()
            .map(|(q, f)| Gate::Rz { q, theta: -2.0 * gamma * f }),
    );
    let mut c = Circuit::fragment(h.num_spins(), SegmentKind::Cost, layer, gates)
        .expect("Hamiltonian indices are in range");
    c.set_last_segment_param(gamma);
    c.add_global_phase(-gamma * h.constant());
    c
}

/// Ring edges of one block, grouped by edge color. Two colors for even `n`,
/// three for odd `n`, and a single edge for `n = 2`.
pub fn ring_edge_colors(n: usize) -> Vec<Vec<(usize, usize)>> {
    match n {
        0 | 1 => vec![],
        2 => vec![vec![(0, 1)]],
        _ => {
            let mut c0 = Vec::new();
            let mut c1 = Vec::new();
            let last_even = if n.is_multiple_of(2) { n } else { n - 1 };
            for j in (0..last_even).step_by(2) {
                c0.push((j, j + 1));
            }
            for j in (1..n - 1).step_by(2) {
                c1.push((j, j + 1));
            }
            if n.is_multiple_of(2) {
                c1.push((n - 1, 0));
                vec![c0, c1]
            } else {
                vec![c0, c1, vec![(n - 1, 0)]]
            }
        }
    }
}

pub fn build_mixer(regime: Regime, layout: &BlockLayout, beta: f64) -> Result<Circuit> {
    mixer_fragment(regime, layout, beta, None)
}

fn mixer_fragment(
    regime: Regime,
    layout: &BlockLayout,
    beta: f64,
    layer: Option<usize>,
) -> Result<Circuit> {
    let m = layout.dimension();
    let gates = match regime {
        Regime::Baseline | Regime::Penalty => (0..m)
            .map(|q| Gate::Rx { q, theta: 2.0 * beta })
            .collect(),
        Regime::Xy => {
            check_rings(layout)?;
            let colors: Vec<_> = layout.sizes().iter().map(|&n| ring_edge_colors(n)).collect();
            let max_colors = colors.iter().map(Vec::len).max().unwrap_or(0);
            let mut gates = Vec::new();
            for color in 0..max_colors {
                for (blk, per_block) in colors.iter().enumerate() {
                    let off = layout.offset(blk);
                    for &(a, b) in per_block.get(color).into_iter().flatten() {
                        gates.push(Gate::Xy { a: off + a, b: off + b, theta: beta });
                    }
                }
            }
            gates
        }
    };
    Circuit::fragment(m, SegmentKind::Mixer, layer, gates)
}

/// Start state. Transverse-field regimes get one `X` per residue on the
/// chosen rotamer (rotamer 0 unless `config` is given). The XY regime puts
/// each block in a superposition of its weight-1 states with an `X` on the
/// first qubit and a chain of `A(π/4, 0)` gates.
pub fn build_initial_state(
    regime: Regime,
    layout: &BlockLayout,
    config: Option<&[usize]>,
) -> Result<Circuit> {
    let mut gates = Vec::new();
    match regime {
        Regime::Baseline | Regime::Penalty => {
            let default = vec![0; layout.num_blocks()];
            let config = config.unwrap_or(&default);
            layout.check_configuration(config)?;
            for (blk, &rot) in config.iter().enumerate() {
                gates.push(Gate::X { q: layout.offset(blk) + rot });
            }
        }
        Regime::Xy => {
            for blk in 0..layout.num_blocks() {
                let off = layout.offset(blk);
                gates.push(Gate::X { q: off });
                for j in 0..layout.size(blk).saturating_sub(1) {
                    gates.push(Gate::A {
                        a: off + j,
                        b: off + j + 1,
                        theta: FRAC_PI_4,
                        phi: 0.0,
                    });
                }
            }
        }
    }
    Circuit::fragment(layout.dimension(), SegmentKind::StatePrep, None, gates)
}

/// Uniformly random valid configuration.
pub fn random_configuration<R: Rng + ?Sized>(layout: &BlockLayout, rng: &mut R) -> Vec<usize> {
    layout.sizes().iter().map(|&n| rng.gen_range(0..n)).collect()
}

/// Start state followed by `p` cost/mixer pairs. `params` is
/// `γ₁, β₁, …, γ_p, β_p`.
pub fn assemble_ansatz(spec: &AnsatzSpec, params: &[f64]) -> Result<Circuit> {
    let mut c = build_initial_state(spec.regime, spec.layout(), spec.initial_configuration())?;
    append_layers(&mut c, spec, params)?;
    Ok(c)
}

/// The `p` cost/mixer pairs without the start state.
pub fn assemble_layers(spec: &AnsatzSpec, params: &[f64]) -> Result<Circuit> {
    let mut c = Circuit::new(spec.num_qubits());
    append_layers(&mut c, spec, params)?;
    Ok(c)
}

fn append_layers(c: &mut Circuit, spec: &AnsatzSpec, params: &[f64]) -> Result<()> {
    if params.len() != spec.num_params() {
        return Err(Error::ParameterCount {
            expected: spec.num_params(),
            got: params.len(),
        });
    }
    for (layer, gb) in params.chunks_exact(2).enumerate() {
        c.append(cost_fragment(&spec.hamiltonian, gb[0], Some(layer)))?;
        c.append(mixer_fragment(spec.regime, spec.layout(), gb[1], Some(layer))?)?;
    }
    Ok(())
}
