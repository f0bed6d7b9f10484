use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::gate::Gate;
use crate::{Error, Result};

/// Role of a contiguous run of gates. The depth analyzer schedules each
/// segment on its own.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentKind {
    StatePrep,
    Cost,
    Mixer,
    Other,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub kind: SegmentKind,
    /// QAOA layer index (0-based) for cost and mixer segments.
    pub layer: Option<usize>,
    pub gates: Range<usize>,
    /// Angle the whole segment was built from (γ for cost segments), letting
    /// simulators replace the gates by an equivalent fast path.
    #[serde(default)]
    pub param: Option<f64>,
}

/// Ordered gate list on `num_qubits` qubits, split into segments, with a
/// tracked global phase `e^{i·global_phase}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    num_qubits: usize,
    gates: Vec<Gate>,
    segments: Vec<Segment>,
    global_phase: f64,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Self {
            num_qubits,
            gates: Vec::new(),
            segments: Vec::new(),
            global_phase: 0.0,
        }
    }

    /// A single-segment circuit.
    pub fn fragment(
        num_qubits: usize,
        kind: SegmentKind,
        layer: Option<usize>,
        gates: Vec<Gate>,
    ) -> Result<Self> {
        let mut c = Self::new(num_qubits);
        c.push_segment(kind, layer, gates)?;
        Ok(c)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn segment_gates(&self, seg: &Segment) -> &[Gate] {
        &self.gates[seg.gates.clone()]
    }

    pub fn global_phase(&self) -> f64 {
        self.global_phase
    }

    pub(crate) fn set_last_segment_param(&mut self, param: f64) {
        if let Some(s) = self.segments.last_mut() {
            s.param = Some(param);
        }
    }

    pub fn add_global_phase(&mut self, phase: f64) {
        self.global_phase += phase;
    }

    fn check(&self, g: &Gate) -> Result<()> {
        let (a, b) = g.qubits();
        if g.max_qubit() >= self.num_qubits {
            return Err(Error::InvalidCircuit(format!(
                "{g} touches qubit {} but the circuit has {}",
                g.max_qubit(),
                self.num_qubits
            )));
        }
        if b == Some(a) {
            return Err(Error::InvalidCircuit(format!("{g} repeats qubit {a}")));
        }
        for x in g.angles() {
            if !x.is_finite() {
                return Err(Error::InvalidCircuit(format!("{g} has a non-finite angle")));
            }
        }
        Ok(())
    }

    /// Append gates as a new segment.
    pub fn push_segment(
        &mut self,
        kind: SegmentKind,
        layer: Option<usize>,
        gates: Vec<Gate>,
    ) -> Result<()> {
        for g in &gates {
            self.check(g)?;
        }
        let start = self.gates.len();
        self.gates.extend(gates);
        self.segments.push(Segment {
            kind,
            layer,
            gates: start..self.gates.len(),
            param: None,
        });
        Ok(())
    }

    /// Append one gate, extending the last segment if it has kind `Other`.
    pub fn push(&mut self, gate: Gate) -> Result<()> {
        self.check(&gate)?;
        self.gates.push(gate);
        let end = self.gates.len();
        match self.segments.last_mut() {
            Some(s) if s.kind == SegmentKind::Other && s.gates.end == end - 1 => s.gates.end = end,
            _ => self.segments.push(Segment {
                kind: SegmentKind::Other,
                layer: None,
                gates: end - 1..end,
                param: None,
            }),
        }
        Ok(())
    }

    /// Concatenate another circuit (segments, gates and phase).
    pub fn append(&mut self, other: Circuit) -> Result<()> {
        if other.num_qubits != self.num_qubits {
            return Err(Error::InvalidCircuit(format!(
                "cannot append a {}-qubit circuit to a {}-qubit one",
                other.num_qubits, self.num_qubits
            )));
        }
        let shift = self.gates.len();
        self.gates.extend(other.gates);
        self.segments.extend(other.segments.into_iter().map(|s| Segment {
            gates: s.gates.start + shift..s.gates.end + shift,
            ..s
        }));
        self.global_phase += other.global_phase;
        Ok(())
    }

    /// Every gate expanded into `CX` and single-qubit rotations. Segment
    /// boundaries are kept.
    pub fn decomposed(&self) -> Circuit {
        let mut out = Circuit::new(self.num_qubits);
        out.global_phase = self.global_phase;
        for s in &self.segments {
            let gates: Vec<Gate> = self.gates[s.gates.clone()]
                .iter()
                .flat_map(Gate::decompose)
                .collect();
            out.push_segment(s.kind, s.layer, gates)
                .expect("decomposition keeps qubit indices");
            if let Some(p) = s.param {
                out.set_last_segment_param(p);
            }
        }
        out
    }

    pub fn two_qubit_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_two_qubit()).count()
    }

    pub fn cnot_count(&self) -> usize {
        self.gates.iter().map(Gate::cx_cost).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_indices() {
        let mut c = Circuit::new(2);
        assert!(c.push(Gate::X { q: 2 }).is_err());
        assert!(c.push(Gate::Rzz { a: 1, b: 1, theta: 0.1 }).is_err());
        assert!(c.push(Gate::Rx { q: 0, theta: f64::NAN }).is_err());
        assert!(c.push(Gate::Cx { control: 0, target: 1 }).is_ok());
    }

    #[test]
    fn append_shifts_segments() {
        let mut a = Circuit::fragment(3, SegmentKind::StatePrep, None, vec![Gate::X { q: 0 }]).unwrap();
        let mut b = Circuit::fragment(
            3,
            SegmentKind::Cost,
            Some(0),
            vec![Gate::Rzz { a: 0, b: 2, theta: 1.0 }, Gate::Rz { q: 1, theta: 0.5 }],
        )
        .unwrap();
        b.add_global_phase(0.25);
        a.append(b).unwrap();
        assert_eq!(a.len(), 3);
        assert_eq!(a.segments()[1].gates, 1..3);
        assert_eq!(a.global_phase(), 0.25);
        assert_eq!(a.cnot_count(), 2);
        let d = a.decomposed();
        assert_eq!(d.segments().len(), 2);
        assert_eq!(d.cnot_count(), 2);
        assert_eq!(d.len(), 1 + 3 + 1);
    }

    #[test]
    fn push_extends_trailing_other_segment() {
        let mut c = Circuit::new(2);
        c.push(Gate::X { q: 0 }).unwrap();
        c.push(Gate::X { q: 1 }).unwrap();
        assert_eq!(c.segments().len(), 1);
        c.push_segment(SegmentKind::Mixer, Some(0), vec![]).unwrap();
        c.push(Gate::X { q: 1 }).unwrap();
        assert_eq!(c.segments().len(), 3);
    }
}
