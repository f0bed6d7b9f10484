//! Plain-text gate lists and a generic line-topology routing estimate.
//!
//! Gate list format: one gate per line, `KIND q0 [q1] [angle...]`, angles in
//! radians. A header line `# qubits <M>` fixes the register size; other lines
//! starting with `#` are comments.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::gate::{Gate, GateKind};
use super::ir::Circuit;
use crate::{Error, Result};

pub fn to_gate_list(circuit: &Circuit) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# qubits {}", circuit.num_qubits());
    let _ = writeln!(out, "# global_phase {:?}", circuit.global_phase());
    for g in circuit.gates() {
        let _ = writeln!(out, "{g}");
    }
    out
}

/// Parse a gate list. Segment structure is not preserved; the result is a
/// single `Other` segment.
pub fn parse_gate_list(text: &str) -> Result<Circuit> {
    let mut declared: Option<usize> = None;
    let mut phase = 0.0;
    let mut gates = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let err = |msg: String| Error::Parse(format!("line {}: {msg}", lineno + 1));
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let mut words = rest.split_whitespace();
            match (words.next(), words.next()) {
                (Some("qubits"), Some(v)) => {
                    declared = Some(v.parse().map_err(|_| err(format!("bad qubit count {v:?}")))?)
                }
                (Some("global_phase"), Some(v)) => {
                    phase = v.parse().map_err(|_| err(format!("bad phase {v:?}")))?
                }
                _ => {}
            }
            continue;
        }
        let mut words = line.split_whitespace();
        let name = words.next().expect("non-empty line");
        let kind = GateKind::from_name(name).ok_or_else(|| err(format!("unknown gate {name:?}")))?;
        let nums: Vec<&str> = words.collect();
        let qubit = |i: usize| -> Result<usize> {
            let w = nums.get(i).ok_or_else(|| err(format!("{kind} is missing operands")))?;
            w.parse().map_err(|_| err(format!("bad qubit index {w:?}")))
        };
        let angle = |i: usize| -> Result<f64> {
            let w = nums.get(i).ok_or_else(|| err(format!("{kind} is missing operands")))?;
            w.parse().map_err(|_| err(format!("bad angle {w:?}")))
        };
        let (gate, arity) = match kind {
            GateKind::X => (Gate::X { q: qubit(0)? }, 1),
            GateKind::Rx => (Gate::Rx { q: qubit(0)?, theta: angle(1)? }, 2),
            GateKind::Ry => (Gate::Ry { q: qubit(0)?, theta: angle(1)? }, 2),
            GateKind::Rz => (Gate::Rz { q: qubit(0)?, theta: angle(1)? }, 2),
            GateKind::Rzz => (Gate::Rzz { a: qubit(0)?, b: qubit(1)?, theta: angle(2)? }, 3),
            GateKind::Xy => (Gate::Xy { a: qubit(0)?, b: qubit(1)?, theta: angle(2)? }, 3),
            GateKind::A => (
                Gate::A { a: qubit(0)?, b: qubit(1)?, theta: angle(2)?, phi: angle(3)? },
                4,
            ),
            GateKind::Cx => (Gate::Cx { control: qubit(0)?, target: qubit(1)? }, 2),
        };
        if nums.len() != arity {
            return Err(err(format!("{kind} takes {arity} operands, got {}", nums.len())));
        }
        gates.push(gate);
    }
    let used = gates.iter().map(|g| g.max_qubit() + 1).max().unwrap_or(0);
    let n = declared.unwrap_or(used);
    let mut c = Circuit::new(n);
    for g in gates {
        c.push(g)?;
    }
    c.add_global_phase(phase);
    Ok(c)
}

/// Routing estimate on a line of qubits with identity placement. Every
/// two-qubit gate on qubits `d > 1` apart is bracketed by `d - 1` SWAPs in and
/// `d - 1` out, each SWAP costing 3 CNOTs. This is a generic topology estimate,
/// not a device-specific transpilation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineRoutingEstimate {
    pub swaps: usize,
    pub logical_cnots: usize,
    pub routed_cnots: usize,
}

pub fn line_routing_estimate(circuit: &Circuit) -> LineRoutingEstimate {
    let swaps: usize = circuit
        .gates()
        .iter()
        .filter_map(Gate::pair)
        .map(|(a, b)| 2 * a.abs_diff(b).saturating_sub(1))
        .sum();
    let logical = circuit.cnot_count();
    LineRoutingEstimate {
        swaps,
        logical_cnots: logical,
        routed_cnots: logical + 3 * swaps,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::ansatz::{assemble_ansatz, cost_hamiltonian, AnsatzSpec, Regime};
    use crate::energy::InstanceGenerator;

    #[test]
    fn gate_list_round_trip() {
        let p = InstanceGenerator::uniform(2, 3, 4).generate().unwrap();
        for regime in Regime::ALL {
            let h = cost_hamiltonian(&p, regime, None).unwrap();
            let spec = AnsatzSpec::new(regime, 2, h).unwrap();
            let c = assemble_ansatz(&spec, &[0.1, -0.2, 0.3, 1.0 / 3.0]).unwrap();
            let text = to_gate_list(&c);
            let back = parse_gate_list(&text).unwrap();
            assert_eq!(back.gates(), c.gates());
            assert_eq!(back.num_qubits(), c.num_qubits());
            assert_eq!(back.global_phase(), c.global_phase());
        }
    }

    #[test]
    fn parse_errors() {
        assert!(parse_gate_list("FOO 1").is_err());
        assert!(parse_gate_list("RZZ 0 1").is_err());
        assert!(parse_gate_list("X 0 1").is_err());
        assert!(parse_gate_list("# qubits 2\nX 3").is_err());
        let c = parse_gate_list("cnot 0 2\n\n# note\n").unwrap();
        assert_eq!(c.num_qubits(), 3);
    }

    #[test]
    fn routing_counts_distance() {
        let c = parse_gate_list("CX 0 1\nRZZ 0 3 0.5\nX 2").unwrap();
        let est = line_routing_estimate(&c);
        assert_eq!(est.swaps, 4);
        assert_eq!(est.logical_cnots, 3);
        assert_eq!(est.routed_cnots, 15);
    }
}
