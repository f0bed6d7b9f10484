//! Logical CNOT-layer depth.
//!
//! Each segment (state prep, every cost block, every mixer block) is
//! scheduled on its own and the segment depths add up. Within a segment,
//! two-qubit gates are placed first-fit in emission order: a gate goes into
//! the lowest layer that comes after every layer holding a gate it does not
//! commute with and that has both of its qubits free. A layer costs as many
//! CNOT layers as its most expensive gate (RZZ and XY: 2, A: 3, CX: 1).
//! Single-qubit gates neither count nor constrain the schedule.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::ansatz::{assemble_ansatz, cost_hamiltonian, AnsatzSpec, Regime};
use super::gate::Gate;
use super::ir::{Circuit, SegmentKind};
use crate::energy::InstanceGenerator;
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduledLayer {
    pub gates: Vec<Gate>,
    pub cx_weight: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentSchedule {
    pub kind: SegmentKind,
    pub layer: Option<usize>,
    pub layers: Vec<ScheduledLayer>,
    pub cd: usize,
    pub cnot_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DepthAnalysis {
    pub cd: usize,
    pub cnot_count: usize,
    pub segments: Vec<SegmentSchedule>,
}

/// Layer the two-qubit gates of one segment.
pub fn schedule_segment(gates: &[Gate]) -> Vec<ScheduledLayer> {
    let mut layers: Vec<Vec<Gate>> = Vec::new();
    for g in gates.iter().filter(|g| g.is_two_qubit()) {
        let (a, b) = g.pair().expect("two-qubit gate");
        let earliest = layers
            .iter()
            .rposition(|layer| layer.iter().any(|h| !g.commutes_with(h)))
            .map_or(0, |i| i + 1);
        let slot = (earliest..layers.len())
            .find(|&i| !layers[i].iter().any(|h| h.acts_on(a) || h.acts_on(b)));
        match slot {
            Some(i) => layers[i].push(*g),
            None => layers.push(vec![*g]),
        }
    }
    layers
        .into_iter()
        .map(|gates| ScheduledLayer {
            cx_weight: gates.iter().map(Gate::cx_cost).max().unwrap_or(0),
            gates,
        })
        .collect()
}

/// CNOT-layer depth and CNOT count of a circuit.
pub fn logical_depth(circuit: &Circuit, include_state_prep: bool) -> DepthAnalysis {
    let segments: Vec<SegmentSchedule> = circuit
        .segments()
        .iter()
        .filter(|s| include_state_prep || s.kind != SegmentKind::StatePrep)
        .map(|s| {
            let gates = circuit.segment_gates(s);
            let layers = schedule_segment(gates);
            SegmentSchedule {
                kind: s.kind,
                layer: s.layer,
                cd: layers.iter().map(|l| l.cx_weight).sum(),
                cnot_count: gates.iter().map(Gate::cx_cost).sum(),
                layers,
            }
        })
        .collect();
    DepthAnalysis {
        cd: segments.iter().map(|s| s.cd).sum(),
        cnot_count: segments.iter().map(|s| s.cnot_count).sum(),
        segments,
    }
}

impl DepthAnalysis {
    /// Human-readable schedule, one line per layer.
    pub fn trace(&self) -> String {
        let mut out = String::new();
        for s in &self.segments {
            let tag = match s.layer {
                Some(l) => format!("{:?}[{l}]", s.kind),
                None => format!("{:?}", s.kind),
            };
            let _ = writeln!(out, "{tag}: cd={} cnots={}", s.cd, s.cnot_count);
            for (i, layer) in s.layers.iter().enumerate() {
                let gates: Vec<String> = layer
                    .gates
                    .iter()
                    .map(|g| {
                        let (a, b) = g.pair().expect("two-qubit gate");
                        format!("{}({a},{b})", g.kind())
                    })
                    .collect();
                let _ = writeln!(out, "  L{i} w={}: {}", layer.cx_weight, gates.join(" "));
            }
        }
        out
    }
}

/// Depth summary of one QAOA configuration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DepthReport {
    pub regime: Regime,
    #[serde(rename = "N")]
    pub num_residues: usize,
    #[serde(rename = "n")]
    pub rotamers: usize,
    pub p: usize,
    /// Without state preparation.
    pub cd: usize,
    /// With state preparation.
    pub cd_sp: usize,
    /// Whole circuit, state preparation included.
    pub cnot_count: usize,
}

/// Depth of a `p`-layer ansatz on `N` residues with `n` rotamers each, for a
/// dense nearest-neighbor instance (every coupling the layout allows is
/// nonzero). Returns the report and the full scheduling trace.
pub fn depth_for_dimensions(
    regime: Regime,
    num_residues: usize,
    rotamers: usize,
    p: usize,
) -> Result<(DepthReport, DepthAnalysis)> {
    let g = InstanceGenerator {
        self_range: (1.0, 2.0),
        pair_range: (1.0, 2.0),
        ..InstanceGenerator::uniform(num_residues, rotamers, 0)
    };
    let problem = g.generate()?;
    let h = cost_hamiltonian(&problem, regime, None)?;
    let spec = AnsatzSpec::new(regime, p, h)?;
    let params: Vec<f64> = (0..spec.num_params()).map(|k| 0.1 + 0.01 * k as f64).collect();
    let circuit = assemble_ansatz(&spec, &params)?;
    let without = logical_depth(&circuit, false);
    let with = logical_depth(&circuit, true);
    Ok((
        DepthReport {
            regime,
            num_residues,
            rotamers,
            p,
            cd: without.cd,
            cd_sp: with.cd,
            cnot_count: with.cnot_count,
        },
        with,
    ))
}

/// Depth rows for `N = n = 2..=max_size`, all regimes, `p = 1`.
pub fn depth_table(max_size: usize) -> Result<Vec<(DepthReport, DepthAnalysis)>> {
    let mut rows = Vec::new();
    for size in 2..=max_size {
        for regime in Regime::ALL {
            rows.push(depth_for_dimensions(regime, size, size, 1)?);
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::ansatz::build_mixer;
    use crate::energy::BlockLayout;

    fn cd(regime: Regime, n_res: usize, n_rot: usize) -> (usize, usize) {
        let (r, _) = depth_for_dimensions(regime, n_res, n_rot, 1).unwrap();
        (r.cd, r.cd_sp)
    }

    #[test]
    fn smallest_rows() {
        assert_eq!(cd(Regime::Xy, 2, 2), (6, 9));
        assert_eq!(cd(Regime::Penalty, 2, 2), (6, 6));
        assert_eq!(cd(Regime::Baseline, 2, 2), (4, 4));
    }

    #[test]
    fn baseline_column() {
        let expect = [(3, 16), (4, 16), (5, 28), (6, 32), (7, 34)];
        for (size, want) in expect {
            assert_eq!(cd(Regime::Baseline, size, size).0, want, "size {size}");
        }
    }

    #[test]
    fn layers_are_conflict_free() {
        let (_, analysis) = depth_for_dimensions(Regime::Penalty, 4, 5, 2).unwrap();
        for s in &analysis.segments {
            for layer in &s.layers {
                let mut used = std::collections::HashSet::new();
                for g in &layer.gates {
                    let (a, b) = g.pair().unwrap();
                    assert!(used.insert(a) && used.insert(b));
                }
            }
        }
    }

    #[test]
    fn xy_mixer_layers() {
        for n in 2..9 {
            let c = build_mixer(Regime::Xy, &BlockLayout::uniform(3, n), 0.3).unwrap();
            let d = logical_depth(&c, true);
            let colors = if n == 2 { 1 } else if n % 2 == 0 { 2 } else { 3 };
            assert_eq!(d.segments[0].layers.len(), colors, "n={n}");
            assert_eq!(d.cd, 2 * colors);
        }
        let c = build_mixer(Regime::Baseline, &BlockLayout::uniform(2, 2), 0.3).unwrap();
        assert_eq!(logical_depth(&c, true).cd, 0);
    }

    #[test]
    fn depth_is_linear_in_p() {
        for regime in Regime::ALL {
            let one = depth_for_dimensions(regime, 3, 4, 1).unwrap().0.cd;
            for p in 2..5 {
                assert_eq!(depth_for_dimensions(regime, 3, 4, p).unwrap().0.cd, p * one);
            }
        }
    }

    #[test]
    fn depth_plateaus_in_residue_count() {
        // First-fit depth is monotone in N and flattens once the chain is long
        // enough for every block to see two neighbors; the penalized n = 5
        // cost graph needs a longer chain before first-fit settles.
        for regime in Regime::ALL {
            for n in 2..6 {
                let series: Vec<usize> = (2..=16).map(|big_n| cd(regime, big_n, n).0).collect();
                assert!(series.windows(2).all(|w| w[0] <= w[1]), "{regime} n={n}: {series:?}");
                let tail = &series[series.len() - 6..];
                assert!(tail.iter().all(|&v| v == tail[0]), "{regime} n={n}: {series:?}");
            }
        }
    }

    #[test]
    fn state_prep_adds_three_per_chain_link() {
        for n in 2..7 {
            let (c, c_sp) = cd(Regime::Xy, 3, n);
            assert_eq!(c_sp - c, 3 * (n - 1));
        }
    }
}
