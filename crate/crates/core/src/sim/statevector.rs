use std::io::Write;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng as _;

use crate::circuit::{Circuit, Gate, GateMatrix, SegmentKind};
use crate::energy::{Bitstring, BlockLayout, IsingHamiltonian};
use crate::rng::Rng;
use crate::{Error, Result};

type C = Complex64;

/// Largest register the dense simulator accepts.
pub const MAX_STATEVECTOR_QUBITS: usize = 30;

/// Dense `2^M` amplitude vector. Qubit `k` is bit `k` of the index.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<C>,
}

/// Precomputed Ising energies `E(x)` for every basis state, used to apply a
/// whole cost segment as one diagonal phase.
#[derive(Debug, Clone)]
pub struct CostTable {
    energies: Arc<Vec<f64>>,
    constant: f64,
}

impl CostTable {
    pub fn new(h: &IsingHamiltonian) -> Result<Self> {
        if h.num_spins() > MAX_STATEVECTOR_QUBITS {
            return Err(Error::TooManyQubits(h.num_spins(), MAX_STATEVECTOR_QUBITS));
        }
        Ok(Self {
            energies: Arc::new(h.energy_table()?),
            constant: h.constant(),
        })
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn num_qubits(&self) -> usize {
        self.energies.len().trailing_zeros() as usize
    }
}

impl StateVector {
    /// `|0…0⟩`.
    pub fn zero(num_qubits: usize) -> Result<Self> {
        if num_qubits > MAX_STATEVECTOR_QUBITS {
            return Err(Error::TooManyQubits(num_qubits, MAX_STATEVECTOR_QUBITS));
        }
        let mut amps = vec![C::new(0.0, 0.0); 1 << num_qubits];
        amps[0] = C::new(1.0, 0.0);
        Ok(Self { num_qubits, amps })
    }

    pub fn basis(bits: &Bitstring) -> Result<Self> {
        let mut s = Self::zero(bits.len())?;
        s.amps[0] = C::new(0.0, 0.0);
        s.amps[bits.as_u64() as usize] = C::new(1.0, 0.0);
        Ok(s)
    }

    /// Wrap raw amplitudes; the length must be a power of two. Not normalized.
    pub fn from_amplitudes(amps: Vec<C>) -> Result<Self> {
        if !amps.len().is_power_of_two() {
            return Err(Error::InvalidConfig(format!(
                "amplitude count {} is not a power of two",
                amps.len()
            )));
        }
        let num_qubits = amps.len().trailing_zeros() as usize;
        if num_qubits > MAX_STATEVECTOR_QUBITS {
            return Err(Error::TooManyQubits(num_qubits, MAX_STATEVECTOR_QUBITS));
        }
        Ok(Self { num_qubits, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[C] {
        &self.amps
    }

    pub fn amplitude(&self, bits: &Bitstring) -> C {
        self.amps[bits.as_u64() as usize]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(C::norm_sqr).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(C::norm_sqr).collect()
    }

    /// Total probability on strings that are not one-hot per block.
    pub fn invalid_mass(&self, layout: &BlockLayout) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .filter(|(x, _)| !layout.is_valid(&Bitstring::from_raw(*x as u64, self.num_qubits)))
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    fn check_gate(&self, g: &Gate) -> Result<()> {
        if g.max_qubit() >= self.num_qubits {
            return Err(Error::IndexOutOfRange(format!(
                "{g} on a {}-qubit state",
                self.num_qubits
            )));
        }
        if let Some((a, b)) = g.pair() {
            if a == b {
                return Err(Error::InvalidCircuit(format!("{g} repeats a qubit")));
            }
        }
        Ok(())
    }

    pub fn apply(&mut self, g: &Gate) -> Result<()> {
        self.check_gate(g)?;
        match *g {
            Gate::Rz { q, theta } => {
                let (m, p) = (C::from_polar(1.0, -theta / 2.0), C::from_polar(1.0, theta / 2.0));
                let bit = 1 << q;
                for (x, a) in self.amps.iter_mut().enumerate() {
                    *a *= if x & bit == 0 { m } else { p };
                }
            }
            Gate::Rzz { a, b, theta } => {
                let (m, p) = (C::from_polar(1.0, -theta / 2.0), C::from_polar(1.0, theta / 2.0));
                let (ba, bb) = (1 << a, 1 << b);
                for (x, amp) in self.amps.iter_mut().enumerate() {
                    let parity = ((x & ba) != 0) ^ ((x & bb) != 0);
                    *amp *= if parity { p } else { m };
                }
            }
            Gate::X { q } => {
                let bit = 1 << q;
                for x in 0..self.amps.len() {
                    if x & bit == 0 {
                        self.amps.swap(x, x | bit);
                    }
                }
            }
            _ => match (g.matrix(), g.qubits()) {
                (GateMatrix::One(m), (q, None)) => self.apply_1q(q, &m),
                (GateMatrix::Two(m), (a, Some(b))) => self.apply_2q(a, b, &m),
                _ => unreachable!("gate arity matches its matrix"),
            },
        }
        Ok(())
    }

    fn apply_1q(&mut self, q: usize, m: &[[C; 2]; 2]) {
        let bit = 1usize << q;
        let half = self.amps.len() >> 1;
        for k in 0..half {
            let i0 = insert_zero(k, q);
            let i1 = i0 | bit;
            let (a0, a1) = (self.amps[i0], self.amps[i1]);
            self.amps[i0] = m[0][0] * a0 + m[0][1] * a1;
            self.amps[i1] = m[1][0] * a0 + m[1][1] * a1;
        }
    }

    /// `m` is indexed by `2·x_b + x_a`.
    fn apply_2q(&mut self, a: usize, b: usize, m: &[[C; 4]; 4]) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let (ba, bb) = (1usize << a, 1usize << b);
        let quarter = self.amps.len() >> 2;
        for k in 0..quarter {
            let base = insert_zero(insert_zero(k, lo), hi);
            let idx = [base, base | ba, base | bb, base | ba | bb];
            let v = idx.map(|i| self.amps[i]);
            for (r, &i) in idx.iter().enumerate() {
                self.amps[i] = m[r][0] * v[0] + m[r][1] * v[1] + m[r][2] * v[2] + m[r][3] * v[3];
            }
        }
    }

    /// Multiply every amplitude by `exp(-iγ (E(x) - k))`.
    pub fn apply_cost_phase(&mut self, table: &CostTable, gamma: f64) -> Result<()> {
        if table.energies.len() != self.amps.len() {
            return Err(Error::LengthMismatch {
                expected: self.amps.len(),
                got: table.energies.len(),
            });
        }
        for (a, &e) in self.amps.iter_mut().zip(table.energies.iter()) {
            *a *= C::from_polar(1.0, -gamma * (e - table.constant));
        }
        Ok(())
    }

    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<()> {
        self.apply_circuit_with(circuit, None)
    }

    /// Apply a circuit; cost segments that carry their angle are applied as a
    /// single diagonal phase when `table` is given. The table must come from
    /// the Hamiltonian the circuit was built from.
    pub fn apply_circuit_with(&mut self, circuit: &Circuit, table: Option<&CostTable>) -> Result<()> {
        if circuit.num_qubits() != self.num_qubits {
            return Err(Error::LengthMismatch {
                expected: self.num_qubits,
                got: circuit.num_qubits(),
            });
        }
        for seg in circuit.segments() {
            match (seg.kind, seg.param, table) {
                (SegmentKind::Cost, Some(gamma), Some(t)) => self.apply_cost_phase(t, gamma)?,
                _ => {
                    for g in circuit.segment_gates(seg) {
                        self.apply(g)?;
                    }
                }
            }
        }
        let phase = C::from_polar(1.0, circuit.global_phase());
        for a in &mut self.amps {
            *a *= phase;
        }
        Ok(())
    }

    /// `Σ_x |a_x|² E(x)`.
    pub fn expectation(&self, h: &IsingHamiltonian) -> Result<f64> {
        if h.num_spins() != self.num_qubits {
            return Err(Error::LengthMismatch {
                expected: self.num_qubits,
                got: h.num_spins(),
            });
        }
        let table = h.energy_table()?;
        Ok(self
            .amps
            .iter()
            .zip(&table)
            .map(|(a, e)| a.norm_sqr() * e)
            .sum())
    }

    /// `shots` independent draws from `|a_x|²`.
    pub fn sample(&self, shots: usize, rng: &mut Rng) -> Vec<Bitstring> {
        let mut cdf = Vec::with_capacity(self.amps.len());
        let mut acc = 0.0;
        for a in &self.amps {
            acc += a.norm_sqr();
            cdf.push(acc);
        }
        let total = acc;
        (0..shots)
            .map(|_| {
                let u = rng.gen::<f64>() * total;
                let x = cdf.partition_point(|&c| c <= u).min(self.amps.len() - 1);
                Bitstring::from_raw(x as u64, self.num_qubits)
            })
            .collect()
    }

    /// Raw dump: each amplitude as two little-endian `f32` (real, imaginary).
    pub fn write_complex64_le<W: Write>(&self, mut w: W) -> Result<()> {
        for a in &self.amps {
            w.write_all(&(a.re as f32).to_le_bytes())?;
            w.write_all(&(a.im as f32).to_le_bytes())?;
        }
        Ok(())
    }
}

/// Insert a zero bit at position `pos` of `k`.
#[inline]
fn insert_zero(k: usize, pos: usize) -> usize {
    let low = k & ((1 << pos) - 1);
    ((k >> pos) << (pos + 1)) | low
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{
        assemble_ansatz, build_initial_state, build_mixer, cost_hamiltonian, AnsatzSpec, Regime,
    };
    use crate::energy::{qubo_to_ising, InstanceGenerator, QuboMatrix};
    use crate::rng::rng_from_seed;
    use std::f64::consts::FRAC_PI_4;

    fn approx(a: C, b: C) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn x_flips_zero() {
        let mut s = StateVector::zero(1).unwrap();
        s.apply(&Gate::X { q: 0 }).unwrap();
        assert!(approx(s.amplitudes()[1], C::new(1.0, 0.0)));
        assert!(s.apply(&Gate::X { q: 1 }).is_err());
    }

    #[test]
    fn xy_on_single_excitation() {
        let beta: f64 = 0.8;
        let mut s = StateVector::basis(&"10".parse().unwrap()).unwrap();
        s.apply(&Gate::Xy { a: 0, b: 1, theta: beta }).unwrap();
        assert!(approx(s.amplitude(&"10".parse().unwrap()), C::new(beta.cos(), 0.0)));
        assert!(approx(s.amplitude(&"01".parse().unwrap()), C::new(0.0, -beta.sin())));
    }

    #[test]
    fn a_gate_keeps_single_excitation() {
        let mut s = StateVector::basis(&"10".parse().unwrap()).unwrap();
        s.apply(&Gate::A { a: 0, b: 1, theta: FRAC_PI_4, phi: 0.0 }).unwrap();
        assert!(s.amplitudes()[0].norm() < 1e-15 && s.amplitudes()[3].norm() < 1e-15);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn xy_state_prep_support() {
        let layout = BlockLayout::uniform(1, 4);
        let c = build_initial_state(Regime::Xy, &layout, None).unwrap();
        let mut s = StateVector::zero(4).unwrap();
        s.apply_circuit(&c).unwrap();
        for (x, a) in s.amplitudes().iter().enumerate() {
            if x.count_ones() == 1 {
                assert!(a.re > 1e-3 && a.im.abs() < 1e-14, "{x}: {a}");
            } else {
                assert!(a.norm() < 1e-14, "{x}: {a}");
            }
        }
    }

    #[test]
    fn xy_mixer_preserves_block_weight() {
        for n in 2..=5 {
            let layout = BlockLayout::uniform(1, n);
            let mixer = build_mixer(Regime::Xy, &layout, 0.77).unwrap();
            for x in 0..(1usize << n) {
                let bits = Bitstring::new(x as u64, n).unwrap();
                let mut s = StateVector::basis(&bits).unwrap();
                s.apply_circuit(&mixer).unwrap();
                let w = x.count_ones();
                for (y, a) in s.amplitudes().iter().enumerate() {
                    if y.count_ones() != w {
                        assert!(a.norm() < 1e-13);
                    }
                }
            }
        }
    }

    #[test]
    fn sampling_basis_state() {
        let s = StateVector::zero(4).unwrap();
        let mut rng = rng_from_seed(1);
        let shots = s.sample(100, &mut rng);
        assert!(shots.iter().all(|b| b.to_string() == "0000"));
    }

    #[test]
    fn sampling_uniform_state() {
        let mut s = StateVector::zero(2).unwrap();
        s.apply(&Gate::Ry { q: 0, theta: std::f64::consts::FRAC_PI_2 }).unwrap();
        s.apply(&Gate::Ry { q: 1, theta: std::f64::consts::FRAC_PI_2 }).unwrap();
        let n = 100_000;
        let mut counts = [0usize; 4];
        for b in s.sample(n, &mut rng_from_seed(2)) {
            counts[b.as_u64() as usize] += 1;
        }
        let sigma = (n as f64 * 0.25 * 0.75).sqrt();
        for c in counts {
            assert!((c as f64 - n as f64 / 4.0).abs() < 4.0 * sigma, "{counts:?}");
        }
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        let mut s = StateVector::zero(3).unwrap();
        for q in 0..3 {
            s.apply(&Gate::Rx { q, theta: 1.0 + q as f64 }).unwrap();
        }
        let a = s.sample(500, &mut rng_from_seed(9));
        let b = s.sample(500, &mut rng_from_seed(9));
        assert_eq!(a, b);
    }

    #[test]
    fn expectation_matches_direct_sum() {
        let mut rng = rng_from_seed(10);
        let m = 10;
        let mut e = vec![0.0; m * m];
        for i in 0..m {
            for j in i..m {
                let v: f64 = rng.gen_range(-1.0..1.0);
                e[i * m + j] = v;
                e[j * m + i] = v;
            }
        }
        let h = qubo_to_ising(&QuboMatrix::from_dense(m, e, 0.3).unwrap()).unwrap();
        let amps: Vec<C> = (0..1 << m)
            .map(|_| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let norm: f64 = amps.iter().map(C::norm_sqr).sum::<f64>().sqrt();
        let s = StateVector::from_amplitudes(amps.iter().map(|a| a / norm).collect()).unwrap();
        let mut direct = 0.0;
        for x in 0..1u64 << m {
            let bits = Bitstring::new(x, m).unwrap();
            direct += s.amplitude(&bits).norm_sqr() * h.energy(&bits);
        }
        assert!((s.expectation(&h).unwrap() - direct).abs() < 1e-10);
    }

    #[test]
    fn expectation_of_field_on_uniform_state() {
        let q = QuboMatrix::from_dense(2, vec![1.0, 0.0, 0.0, 0.0], 0.0).unwrap();
        let h = qubo_to_ising(&q).unwrap();
        let mut s = StateVector::zero(2).unwrap();
        for q in 0..2 {
            s.apply(&Gate::Ry { q, theta: std::f64::consts::FRAC_PI_2 }).unwrap();
        }
        // E = x_0, so the mean over a uniform state is 1/2 = k.
        assert!((s.expectation(&h).unwrap() - h.constant()).abs() < 1e-14);
    }

    #[test]
    fn cost_phase_matches_gates() {
        for regime in Regime::ALL {
            let p = InstanceGenerator::uniform(3, 3, 17).generate().unwrap();
            let h = cost_hamiltonian(&p, regime, None).unwrap();
            let spec = AnsatzSpec::new(regime, 2, h.clone()).unwrap();
            let c = assemble_ansatz(&spec, &[0.31, -0.7, 1.2, 0.45]).unwrap();
            let table = CostTable::new(&h).unwrap();
            let mut slow = StateVector::zero(9).unwrap();
            slow.apply_circuit(&c).unwrap();
            let mut fast = StateVector::zero(9).unwrap();
            fast.apply_circuit_with(&c, Some(&table)).unwrap();
            for (a, b) in slow.amplitudes().iter().zip(fast.amplitudes()) {
                assert!((a - b).norm() < 1e-12);
            }
            assert!((slow.norm_sqr() - 1.0).abs() < 1e-10);
            if regime == Regime::Xy {
                assert!(slow.invalid_mass(p.layout()) < 1e-20);
            }
        }
    }

    #[test]
    fn dump_length() {
        let s = StateVector::zero(3).unwrap();
        let mut buf = Vec::new();
        s.write_complex64_le(&mut buf).unwrap();
        assert_eq!(buf.len(), 8 * 8);
        assert_eq!(&buf[0..4], &1.0f32.to_le_bytes());
    }
}
