use std::collections::BTreeMap;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::problem::{PairTable, RotamerProblem};
use crate::rng::rng_from_seed;
use crate::{Error, Result};

/// How many rotamers each residue gets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RotamerCounts {
    Uniform(usize),
    PerResidue(Vec<usize>),
    /// Drawn independently per residue from `min..=max`.
    Random { min: usize, max: usize },
}

/// Seeded synthetic instance generator.
///
/// Self energies are uniform in `self_range`, nearest-neighbor pair energies
/// uniform in `pair_range`. With `long_range_decay = Some(f)` every residue
/// pair gets a table, and a pair at distance `d > 1` is scaled so that its
/// largest magnitude is at most `f^(d-1)` times the largest realized magnitude
/// at `d = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InstanceGenerator {
    pub num_residues: usize,
    pub rotamers: RotamerCounts,
    pub self_range: (f64, f64),
    pub pair_range: (f64, f64),
    pub long_range_decay: Option<f64>,
    pub seed: u64,
}

impl Default for InstanceGenerator {
    fn default() -> Self {
        Self {
            num_residues: 2,
            rotamers: RotamerCounts::Uniform(2),
            self_range: (-3.0, 3.0),
            pair_range: (-1.0, 1.0),
            long_range_decay: None,
            seed: 0,
        }
    }
}

impl InstanceGenerator {
    pub fn uniform(num_residues: usize, rotamers: usize, seed: u64) -> Self {
        Self {
            num_residues,
            rotamers: RotamerCounts::Uniform(rotamers),
            seed,
            ..Self::default()
        }
    }

    pub fn with_decay(mut self, decay: f64) -> Self {
        self.long_range_decay = Some(decay);
        self
    }

    pub fn generate(&self) -> Result<RotamerProblem> {
        let n = self.num_residues;
        if n == 0 {
            return Err(Error::InvalidConfig("num_residues must be at least 1".into()));
        }
        for (name, (lo, hi)) in [("self_range", self.self_range), ("pair_range", self.pair_range)] {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::InvalidConfig(format!("{name} must be a finite interval")));
            }
        }
        if let Some(f) = self.long_range_decay {
            if !(0.0..=1.0).contains(&f) {
                return Err(Error::InvalidConfig(format!("decay {f} outside [0, 1]")));
            }
        }

        let mut rng = rng_from_seed(self.seed);
        let sizes: Vec<usize> = match &self.rotamers {
            RotamerCounts::Uniform(k) => vec![*k; n],
            RotamerCounts::PerResidue(v) => {
                if v.len() != n {
                    return Err(Error::InvalidConfig(format!(
                        "{} rotamer counts for {n} residues",
                        v.len()
                    )));
                }
                v.clone()
            }
            RotamerCounts::Random { min, max } => {
                if min > max {
                    return Err(Error::InvalidConfig("empty rotamer-count range".into()));
                }
                (0..n).map(|_| rng.gen_range(*min..=*max)).collect()
            }
        };
        if sizes.contains(&0) {
            return Err(Error::InvalidConfig("rotamer counts must be at least 1".into()));
        }

        let mut draw = |(lo, hi): (f64, f64)| if lo == hi { lo } else { rng.gen_range(lo..hi) };

        let self_energy: Vec<Vec<f64>> = sizes
            .iter()
            .map(|&k| (0..k).map(|_| draw(self.self_range)).collect())
            .collect();

        let mut pairs = BTreeMap::new();
        for i in 0..n.saturating_sub(1) {
            let mut t = PairTable::zeros(sizes[i], sizes[i + 1]);
            for a in 0..sizes[i] {
                for b in 0..sizes[i + 1] {
                    t.set(a, b, draw(self.pair_range));
                }
            }
            pairs.insert((i, i + 1), t);
        }

        if let Some(decay) = self.long_range_decay {
            let nn_max = pairs.values().fold(0.0f64, |m, t| m.max(t.max_abs()));
            let range_max = self.pair_range.0.abs().max(self.pair_range.1.abs());
            for d in 2..n {
                let scale = if range_max > 0.0 {
                    decay.powi(d as i32 - 1) * nn_max / range_max
                } else {
                    0.0
                };
                for i in 0..n - d {
                    let j = i + d;
                    let mut t = PairTable::zeros(sizes[i], sizes[j]);
                    for a in 0..sizes[i] {
                        for b in 0..sizes[j] {
                            t.set(a, b, scale * draw(self.pair_range));
                        }
                    }
                    pairs.insert((i, j), t);
                }
            }
        }

        RotamerProblem::from_tables(self_energy, pairs, self.long_range_decay.is_none())
    }
}
