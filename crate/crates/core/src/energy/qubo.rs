use serde::{Deserialize, Serialize};

use super::bitstring::Bitstring;
use super::layout::BlockLayout;
use super::problem::RotamerProblem;
use crate::{Error, Result};

/// Shape of the one-rotamer-per-residue penalty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PenaltyForm {
    /// `λ (1 - Σ_block x)^2`: intra-block off-diagonals `λ`, diagonal `-λ`,
    /// constant `λ` per block. Penalizes both empty and crowded blocks.
    #[default]
    OneHot,
    /// Intra-block off-diagonals `λ` only. Leaves empty blocks unpenalized.
    PairwiseOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Penalty {
    pub lambda: f64,
    #[serde(default)]
    pub form: PenaltyForm,
}

impl Penalty {
    pub fn one_hot(lambda: f64) -> Self {
        Self {
            lambda,
            form: PenaltyForm::OneHot,
        }
    }

    pub fn pairwise(lambda: f64) -> Self {
        Self {
            lambda,
            form: PenaltyForm::PairwiseOnly,
        }
    }

    /// One-hot penalty with `λ = max_a (|Q_aa| + 2 Σ_{b outside block(a)} |Q_ab|) + 1`.
    ///
    /// With this λ every invalid bitstring has a single-bit flip that lowers the
    /// penalized energy, so all single-flip local minima are valid.
    pub fn default_for(problem: &RotamerProblem) -> Self {
        let q = QuboMatrix::unpenalized(problem);
        let m = q.dimension();
        let layout = q.layout();
        let bound = (0..m)
            .map(|a| {
                let blk = layout.block_of(a);
                let off: f64 = (0..m)
                    .filter(|&b| layout.block_of(b) != blk)
                    .map(|b| q.get(a, b).abs())
                    .sum();
                q.get(a, a).abs() + 2.0 * off
            })
            .fold(0.0, f64::max);
        Self::one_hot(bound + 1.0)
    }

    /// One-hot penalty large enough that every invalid bitstring costs more
    /// than every valid one: λ exceeds the total magnitude of all QUBO terms.
    pub fn separating(problem: &RotamerProblem) -> Self {
        let q = QuboMatrix::unpenalized(problem);
        let m = q.dimension();
        let total: f64 = (0..m)
            .flat_map(|a| (0..m).map(move |b| (a, b)))
            .map(|(a, b)| q.get(a, b).abs())
            .sum();
        Self::one_hot(total + 1.0)
    }
}

/// Dense symmetric QUBO matrix with a constant offset: `E(x) = xᵀQx + offset`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuboMatrix {
    layout: BlockLayout,
    entries: Vec<f64>,
    offset: f64,
    penalty: Option<Penalty>,
}

/// Build the QUBO of a problem, optionally with a penalty.
pub fn build_qubo(problem: &RotamerProblem, penalty: Option<Penalty>) -> Result<QuboMatrix> {
    let mut q = QuboMatrix::unpenalized(problem);
    if let Some(p) = penalty {
        q.add_penalty(p)?;
    }
    Ok(q)
}

impl QuboMatrix {
    fn unpenalized(problem: &RotamerProblem) -> Self {
        let layout = problem.layout().clone();
        let m = layout.dimension();
        let mut entries = vec![0.0; m * m];
        for (i, row) in problem.self_energies().iter().enumerate() {
            let off = layout.offset(i);
            for (a, &e) in row.iter().enumerate() {
                entries[(off + a) * m + off + a] = e;
            }
        }
        for ((i, j), t) in problem.pair_tables() {
            let (oi, oj) = (layout.offset(i), layout.offset(j));
            for a in 0..t.rows() {
                for b in 0..t.cols() {
                    let half = 0.5 * t.get(a, b);
                    entries[(oi + a) * m + oj + b] = half;
                    entries[(oj + b) * m + oi + a] = half;
                }
            }
        }
        Self {
            layout,
            entries,
            offset: 0.0,
            penalty: None,
        }
    }

    fn add_penalty(&mut self, p: Penalty) -> Result<()> {
        if !(p.lambda > 0.0 && p.lambda.is_finite()) {
            return Err(Error::NonPositivePenalty(p.lambda));
        }
        let m = self.dimension();
        for blk in 0..self.layout.num_blocks() {
            let off = self.layout.offset(blk);
            let n = self.layout.size(blk);
            for a in off..off + n {
                for b in off..off + n {
                    if a != b {
                        self.entries[a * m + b] += p.lambda;
                    }
                }
                if p.form == PenaltyForm::OneHot {
                    self.entries[a * m + a] -= p.lambda;
                }
            }
            if p.form == PenaltyForm::OneHot {
                self.offset += p.lambda;
            }
        }
        self.penalty = Some(p);
        Ok(())
    }

    /// Wrap an arbitrary row-major `M × M` matrix. Each variable is its own
    /// block. Symmetry is not checked here.
    pub fn from_dense(dimension: usize, entries: Vec<f64>, offset: f64) -> Result<Self> {
        if entries.len() != dimension * dimension {
            return Err(Error::LengthMismatch {
                expected: dimension * dimension,
                got: entries.len(),
            });
        }
        Ok(Self {
            layout: BlockLayout::uniform(dimension, 1),
            entries,
            offset,
            penalty: None,
        })
    }

    pub fn dimension(&self) -> usize {
        self.layout.dimension()
    }

    pub fn layout(&self) -> &BlockLayout {
        &self.layout
    }

    pub fn block_offsets(&self) -> &[usize] {
        self.layout.offsets()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.dimension() + col]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn penalty(&self) -> Option<Penalty> {
        self.penalty
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// First asymmetric pair `(row, col)` with `row < col`, if any.
    pub fn asymmetry(&self, tol: f64) -> Option<(usize, usize)> {
        let m = self.dimension();
        (0..m)
            .flat_map(|i| (i + 1..m).map(move |j| (i, j)))
            .find(|&(i, j)| (self.get(i, j) - self.get(j, i)).abs() > tol)
    }

    pub fn is_symmetric(&self) -> bool {
        self.asymmetry(0.0).is_none()
    }

    /// `xᵀQx + offset`.
    pub fn energy(&self, bits: &Bitstring) -> f64 {
        debug_assert_eq!(bits.len(), self.dimension());
        let m = self.dimension();
        let mut set = [0usize; 64];
        let mut w = 0;
        let mut v = bits.as_u64();
        while v != 0 {
            set[w] = v.trailing_zeros() as usize;
            v &= v - 1;
            w += 1;
        }
        let set = &set[..w];
        let mut e = self.offset;
        for (k, &a) in set.iter().enumerate() {
            let row = &self.entries[a * m..(a + 1) * m];
            e += row[a];
            for &b in &set[..k] {
                e += row[b] + self.entries[b * m + a];
            }
        }
        e
    }

    pub fn try_energy(&self, bits: &Bitstring) -> Result<f64> {
        if bits.len() != self.dimension() {
            return Err(Error::LengthMismatch {
                expected: self.dimension(),
                got: bits.len(),
            });
        }
        Ok(self.energy(bits))
    }
}
