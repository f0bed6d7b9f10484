use super::bitstring::Bitstring;
use super::layout::BlockLayout;
use super::qubo::{Penalty, QuboMatrix};
use crate::{Error, Result};

/// `H(z) = Σ_{i<j} J_ij z_i z_j - Σ_i h_i z_i + k` over spins `z = 1 - 2x`.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingHamiltonian {
    layout: BlockLayout,
    /// Row-major `M × M`; only entries with `i < j` are used.
    couplings: Vec<f64>,
    fields: Vec<f64>,
    constant: f64,
    penalty: Option<Penalty>,
}

/// Expand `xᵀQx + offset` under `x = (1 - z) / 2`.
pub fn qubo_to_ising(q: &QuboMatrix) -> Result<IsingHamiltonian> {
    let tol = 1e-12 * q.max_abs().max(1.0);
    if let Some((row, col)) = q.asymmetry(tol) {
        return Err(Error::NotSymmetric {
            row,
            col,
            upper: q.get(row, col),
            lower: q.get(col, row),
        });
    }
    let m = q.dimension();
    let mut couplings = vec![0.0; m * m];
    let mut fields = vec![0.0; m];
    let mut constant = q.offset();
    for i in 0..m {
        // Q_ii x_i = Q_ii/2 - (Q_ii/2) z_i
        let d = q.get(i, i);
        constant += 0.5 * d;
        fields[i] += 0.5 * d;
        for j in i + 1..m {
            // w x_i x_j = w/4 (1 - z_i - z_j + z_i z_j)
            let w = q.get(i, j) + q.get(j, i);
            if w == 0.0 {
                continue;
            }
            couplings[i * m + j] = 0.25 * w;
            fields[i] += 0.25 * w;
            fields[j] += 0.25 * w;
            constant += 0.25 * w;
        }
    }
    Ok(IsingHamiltonian {
        layout: q.layout().clone(),
        couplings,
        fields,
        constant,
        penalty: q.penalty(),
    })
}

impl IsingHamiltonian {
    pub fn num_spins(&self) -> usize {
        self.fields.len()
    }

    pub fn layout(&self) -> &BlockLayout {
        &self.layout
    }

    pub fn penalty(&self) -> Option<Penalty> {
        self.penalty
    }

    /// `J_ij` for `i < j` (arguments may come in either order).
    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        if a == b {
            0.0
        } else {
            self.couplings[a * self.num_spins() + b]
        }
    }

    pub fn field(&self, i: usize) -> f64 {
        self.fields[i]
    }

    pub fn fields(&self) -> &[f64] {
        &self.fields
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    /// Nonzero couplings `(i, j, J_ij)` with `i < j`, in row-major order.
    pub fn nonzero_couplings(&self) -> Vec<(usize, usize, f64)> {
        let m = self.num_spins();
        (0..m)
            .flat_map(|i| (i + 1..m).map(move |j| (i, j)))
            .filter_map(|(i, j)| {
                let v = self.couplings[i * m + j];
                (v != 0.0).then_some((i, j, v))
            })
            .collect()
    }

    pub fn nonzero_fields(&self) -> Vec<(usize, f64)> {
        self.fields
            .iter()
            .enumerate()
            .filter(|(_, &h)| h != 0.0)
            .map(|(i, &h)| (i, h))
            .collect()
    }

    /// Energy at a spin configuration, `z_i ∈ {+1, -1}`.
    pub fn energy_spins(&self, z: &[i8]) -> f64 {
        let m = self.num_spins();
        assert_eq!(z.len(), m);
        let mut e = self.constant;
        for i in 0..m {
            let zi = f64::from(z[i]);
            e -= self.fields[i] * zi;
            let row = &self.couplings[i * m..(i + 1) * m];
            for j in i + 1..m {
                if row[j] != 0.0 {
                    e += row[j] * zi * f64::from(z[j]);
                }
            }
        }
        e
    }

    /// Energy of a bitstring via `z = 1 - 2x`.
    pub fn energy(&self, bits: &Bitstring) -> f64 {
        let z: Vec<i8> = bits.iter().map(|b| if b { -1 } else { 1 }).collect();
        self.energy_spins(&z)
    }

    /// Energies of all `2^M` basis states, indexed by the packed bitstring.
    pub fn energy_table(&self) -> Result<Vec<f64>> {
        let m = self.num_spins();
        if m > 30 {
            return Err(Error::TooManyQubits(m, 30));
        }
        let mut table = vec![0.0; 1usize << m];
        table[0] = self.constant - self.fields.iter().sum::<f64>()
            + (0..m)
                .flat_map(|i| (i + 1..m).map(move |j| (i, j)))
                .map(|(i, j)| self.couplings[i * m + j])
                .sum::<f64>();
        for k in 0..m {
            // Flip z_k from +1 to -1 on every state whose bits >= k are zero.
            let above: f64 = (k + 1..m).map(|j| self.couplings[k * m + j]).sum();
            let below: Vec<f64> = (0..k).map(|j| self.couplings[j * m + k]).collect();
            let bit = 1usize << k;
            for x in 0..bit {
                let mut s = above;
                for (j, &c) in below.iter().enumerate() {
                    if c != 0.0 {
                        s += if (x >> j) & 1 == 1 { -c } else { c };
                    }
                }
                table[x | bit] = table[x] - 2.0 * (s - self.fields[k]);
            }
        }
        Ok(table)
    }
}
