use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::bitstring::Bitstring;
use super::layout::{BlockLayout, Decoded};
use crate::{Error, Result};

/// Two pair entries that differ by more than this are reported as asymmetric.
pub const SYMMETRY_TOLERANCE: f64 = 1e-9;

/// Dense `n_i × n_j` table of pair energies between residues `i < j`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairTable {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl PairTable {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            values: vec![0.0; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, alpha: usize, beta: usize) -> f64 {
        self.values[alpha * self.cols + beta]
    }

    pub fn set(&mut self, alpha: usize, beta: usize, value: f64) {
        self.values[alpha * self.cols + beta] = value;
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// A rotamer packing instance: per-residue rotamer counts with self and pair
/// energy tables.
#[derive(Debug, Clone, PartialEq)]
pub struct RotamerProblem {
    layout: BlockLayout,
    self_energy: Vec<Vec<f64>>,
    pairs: BTreeMap<(usize, usize), PairTable>,
    nearest_neighbor_only: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelfEnergy {
    pub residue: usize,
    pub rotamer: usize,
    pub energy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairEnergy {
    pub res_i: usize,
    pub rot_i: usize,
    pub res_j: usize,
    pub rot_j: usize,
    pub energy: f64,
}

/// On-disk JSON form of a problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub num_residues: usize,
    pub rotamers_per_residue: Vec<usize>,
    pub self_energy: Vec<SelfEnergy>,
    #[serde(default)]
    pub pair_energy: Vec<PairEnergy>,
    #[serde(default = "default_nearest_neighbor")]
    pub nearest_neighbor_only: bool,
}

fn default_nearest_neighbor() -> bool {
    true
}

impl RotamerProblem {
    /// Validate raw entries and build a problem.
    ///
    /// Pair entries may be given in either orientation, and an entry may appear
    /// in both orientations as long as the two values agree.
    pub fn from_entries(
        rotamers_per_residue: Vec<usize>,
        self_entries: &[SelfEnergy],
        pair_entries: &[PairEnergy],
        nearest_neighbor_only: bool,
    ) -> Result<Self> {
        let n_res = rotamers_per_residue.len();
        if n_res == 0 {
            return Err(Error::InvalidProblem("at least one residue is required".into()));
        }
        if let Some(i) = rotamers_per_residue.iter().position(|&n| n == 0) {
            return Err(Error::InvalidProblem(format!("residue {i} has no rotamers")));
        }

        let mut self_energy: Vec<Vec<Option<f64>>> =
            rotamers_per_residue.iter().map(|&n| vec![None; n]).collect();
        for e in self_entries {
            check_index(&rotamers_per_residue, e.residue, e.rotamer)?;
            check_finite(e.energy)?;
            let slot = &mut self_energy[e.residue][e.rotamer];
            if slot.is_some() {
                return Err(Error::DuplicateSelfEnergy {
                    residue: e.residue,
                    rotamer: e.rotamer,
                });
            }
            *slot = Some(e.energy);
        }
        let self_energy = self_energy
            .into_iter()
            .enumerate()
            .map(|(i, row)| {
                row.into_iter()
                    .enumerate()
                    .map(|(a, v)| v.ok_or(Error::MissingSelfEnergy { residue: i, rotamer: a }))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;

        let mut seen: BTreeMap<(usize, usize, usize, usize), f64> = BTreeMap::new();
        let mut pairs: BTreeMap<(usize, usize), PairTable> = BTreeMap::new();
        for e in pair_entries {
            check_index(&rotamers_per_residue, e.res_i, e.rot_i)?;
            check_index(&rotamers_per_residue, e.res_j, e.rot_j)?;
            check_finite(e.energy)?;
            if e.res_i == e.res_j {
                return Err(Error::InvalidProblem(format!(
                    "pair energy within residue {}",
                    e.res_i
                )));
            }
            if nearest_neighbor_only && e.res_i.abs_diff(e.res_j) != 1 {
                return Err(Error::NonAdjacentPair {
                    res_i: e.res_i,
                    res_j: e.res_j,
                });
            }
            let (i, a, j, b) = if e.res_i < e.res_j {
                (e.res_i, e.rot_i, e.res_j, e.rot_j)
            } else {
                (e.res_j, e.rot_j, e.res_i, e.rot_i)
            };
            if let Some(&prev) = seen.get(&(i, a, j, b)) {
                if (prev - e.energy).abs() > SYMMETRY_TOLERANCE {
                    return Err(Error::AsymmetricPair {
                        res_i: e.res_i,
                        rot_i: e.rot_i,
                        res_j: e.res_j,
                        rot_j: e.rot_j,
                        forward: prev,
                        backward: e.energy,
                    });
                }
                continue;
            }
            seen.insert((i, a, j, b), e.energy);
            pairs
                .entry((i, j))
                .or_insert_with(|| PairTable::zeros(rotamers_per_residue[i], rotamers_per_residue[j]))
                .set(a, b, e.energy);
        }

        Ok(Self {
            layout: BlockLayout::new(rotamers_per_residue),
            self_energy,
            pairs,
            nearest_neighbor_only,
        })
    }

    /// Build from dense tables. `pairs` is keyed by `(i, j)` with `i < j`.
    pub fn from_tables(
        self_energy: Vec<Vec<f64>>,
        pairs: BTreeMap<(usize, usize), PairTable>,
        nearest_neighbor_only: bool,
    ) -> Result<Self> {
        let sizes: Vec<usize> = self_energy.iter().map(Vec::len).collect();
        let self_entries: Vec<SelfEnergy> = self_energy
            .iter()
            .enumerate()
            .flat_map(|(i, row)| {
                row.iter().enumerate().map(move |(a, &energy)| SelfEnergy {
                    residue: i,
                    rotamer: a,
                    energy,
                })
            })
            .collect();
        let mut pair_entries = Vec::new();
        for (&(i, j), table) in &pairs {
            if i >= j || j >= sizes.len() || table.rows != sizes[i] || table.cols != sizes[j] {
                return Err(Error::InvalidProblem(format!(
                    "pair table ({i},{j}) does not match the residue layout"
                )));
            }
            for a in 0..table.rows {
                for b in 0..table.cols {
                    pair_entries.push(PairEnergy {
                        res_i: i,
                        rot_i: a,
                        res_j: j,
                        rot_j: b,
                        energy: table.get(a, b),
                    });
                }
            }
        }
        Self::from_entries(sizes, &self_entries, &pair_entries, nearest_neighbor_only)
    }

    pub fn from_file(file: ProblemFile) -> Result<Self> {
        if file.num_residues != file.rotamers_per_residue.len() {
            return Err(Error::InvalidProblem(format!(
                "num_residues is {} but rotamers_per_residue has {} entries",
                file.num_residues,
                file.rotamers_per_residue.len()
            )));
        }
        Self::from_entries(
            file.rotamers_per_residue,
            &file.self_energy,
            &file.pair_energy,
            file.nearest_neighbor_only,
        )
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: ProblemFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_file(file)
    }

    pub fn from_json_reader<R: Read>(reader: R) -> Result<Self> {
        let file: ProblemFile =
            serde_json::from_reader(reader).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_file(file)
    }

    /// Tabular form: header `kind,res_i,rot_i,res_j,rot_j,energy`, one row per
    /// entry, `kind` is `self` or `pair`, and the `res_j`/`rot_j` cells are
    /// empty on self rows. Rotamer counts are inferred from the self rows.
    pub fn from_csv_reader<R: Read>(reader: R, nearest_neighbor_only: bool) -> Result<Self> {
        #[derive(Deserialize)]
        struct Row {
            kind: String,
            res_i: usize,
            rot_i: usize,
            res_j: Option<usize>,
            rot_j: Option<usize>,
            energy: f64,
        }

        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let mut self_entries = Vec::new();
        let mut pair_entries = Vec::new();
        for (line, row) in rdr.deserialize::<Row>().enumerate() {
            let row = row.map_err(|e| Error::Parse(e.to_string()))?;
            match row.kind.to_ascii_lowercase().as_str() {
                "self" => self_entries.push(SelfEnergy {
                    residue: row.res_i,
                    rotamer: row.rot_i,
                    energy: row.energy,
                }),
                "pair" => {
                    let (Some(res_j), Some(rot_j)) = (row.res_j, row.rot_j) else {
                        return Err(Error::Parse(format!(
                            "row {}: pair entry without res_j/rot_j",
                            line + 1
                        )));
                    };
                    pair_entries.push(PairEnergy {
                        res_i: row.res_i,
                        rot_i: row.rot_i,
                        res_j,
                        rot_j,
                        energy: row.energy,
                    });
                }
                other => {
                    return Err(Error::Parse(format!(
                        "row {}: unknown entry kind {other:?}",
                        line + 1
                    )))
                }
            }
        }

        let num_residues = self_entries
            .iter()
            .map(|e| e.residue + 1)
            .chain(pair_entries.iter().map(|e| e.res_i.max(e.res_j) + 1))
            .max()
            .unwrap_or(0);
        let mut counts = vec![0usize; num_residues];
        for e in &self_entries {
            counts[e.residue] = counts[e.residue].max(e.rotamer + 1);
        }
        Self::from_entries(counts, &self_entries, &pair_entries, nearest_neighbor_only)
    }

    /// Load by extension: `.csv` is tabular, read in nearest-neighbor mode
    /// when `csv_nearest_neighbor_only` is set; anything else is JSON.
    pub fn load(path: impl AsRef<Path>, csv_nearest_neighbor_only: bool) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path)?;
        let reader = std::io::BufReader::new(file);
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => {
                Self::from_csv_reader(reader, csv_nearest_neighbor_only)
            }
            _ => Self::from_json_reader(reader),
        }
    }

    pub fn to_file(&self) -> ProblemFile {
        let self_energy = self
            .self_energy
            .iter()
            .enumerate()
            .flat_map(|(i, row)| {
                row.iter().enumerate().map(move |(a, &energy)| SelfEnergy {
                    residue: i,
                    rotamer: a,
                    energy,
                })
            })
            .collect();
        let pair_energy = self
            .pairs
            .iter()
            .flat_map(|(&(i, j), t)| {
                (0..t.rows).flat_map(move |a| {
                    (0..t.cols).map(move |b| PairEnergy {
                        res_i: i,
                        rot_i: a,
                        res_j: j,
                        rot_j: b,
                        energy: t.get(a, b),
                    })
                })
            })
            .collect();
        ProblemFile {
            num_residues: self.num_residues(),
            rotamers_per_residue: self.layout.sizes().to_vec(),
            self_energy,
            pair_energy,
            nearest_neighbor_only: self.nearest_neighbor_only,
        }
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_file())?)
    }

    pub fn write_json<W: Write>(&self, writer: W) -> Result<()> {
        serde_json::to_writer_pretty(writer, &self.to_file())?;
        Ok(())
    }

    pub fn num_residues(&self) -> usize {
        self.layout.num_blocks()
    }

    pub fn rotamers_per_residue(&self) -> &[usize] {
        self.layout.sizes()
    }

    pub fn rotamers(&self, residue: usize) -> usize {
        self.layout.size(residue)
    }

    pub fn layout(&self) -> &BlockLayout {
        &self.layout
    }

    pub fn block_offsets(&self) -> &[usize] {
        self.layout.offsets()
    }

    /// Number of binary variables `M`.
    pub fn dimension(&self) -> usize {
        self.layout.dimension()
    }

    pub fn nearest_neighbor_only(&self) -> bool {
        self.nearest_neighbor_only
    }

    pub fn self_energy(&self, residue: usize, rotamer: usize) -> f64 {
        self.self_energy[residue][rotamer]
    }

    pub fn self_energies(&self) -> &[Vec<f64>] {
        &self.self_energy
    }

    /// Pair energy in either orientation; zero where no entry was given.
    pub fn pair_energy(&self, res_i: usize, rot_i: usize, res_j: usize, rot_j: usize) -> f64 {
        if res_i < res_j {
            self.pairs.get(&(res_i, res_j)).map_or(0.0, |t| t.get(rot_i, rot_j))
        } else if res_j < res_i {
            self.pairs.get(&(res_j, res_i)).map_or(0.0, |t| t.get(rot_j, rot_i))
        } else {
            0.0
        }
    }

    pub fn pair_table(&self, i: usize, j: usize) -> Option<&PairTable> {
        self.pairs.get(&(i, j))
    }

    /// Stored pair tables keyed by `(i, j)` with `i < j`.
    pub fn pair_tables(&self) -> impl Iterator<Item = ((usize, usize), &PairTable)> {
        self.pairs.iter().map(|(&k, t)| (k, t))
    }

    /// Total energy of a configuration (one rotamer index per residue).
    ///
    /// Panics if the configuration has the wrong length or an index is out of
    /// range; use [`try_energy`](Self::try_energy) for untrusted input.
    pub fn energy(&self, config: &[usize]) -> f64 {
        assert_eq!(config.len(), self.num_residues(), "configuration length");
        let mut e: f64 = config
            .iter()
            .enumerate()
            .map(|(i, &a)| self.self_energy[i][a])
            .sum();
        for (&(i, j), t) in &self.pairs {
            e += t.get(config[i], config[j]);
        }
        e
    }

    pub fn try_energy(&self, config: &[usize]) -> Result<f64> {
        if config.len() != self.num_residues() {
            return Err(Error::LengthMismatch {
                expected: self.num_residues(),
                got: config.len(),
            });
        }
        for (i, &a) in config.iter().enumerate() {
            check_index(self.layout.sizes(), i, a)?;
        }
        Ok(self.energy(config))
    }

    pub fn decode(&self, bits: &Bitstring) -> Result<Decoded> {
        self.layout.decode(bits)
    }

    pub fn encode(&self, config: &[usize]) -> Result<Bitstring> {
        self.layout.encode(config)
    }

    /// Number of valid configurations `Π n_i`, as a float to avoid overflow.
    pub fn search_space_size(&self) -> f64 {
        self.layout.sizes().iter().map(|&n| n as f64).product()
    }

    /// Remove residues with a single rotamer, folding their self and pair
    /// energies into the remaining residues and a constant.
    pub fn freeze_single_rotamer_residues(&self) -> Result<FrozenProblem> {
        let kept: Vec<usize> = (0..self.num_residues())
            .filter(|&i| self.rotamers(i) > 1)
            .collect();
        let fixed: Vec<usize> = (0..self.num_residues())
            .filter(|&i| self.rotamers(i) == 1)
            .collect();
        if kept.is_empty() {
            return Err(Error::InvalidProblem(
                "every residue has a single rotamer".into(),
            ));
        }

        let mut constant: f64 = fixed.iter().map(|&i| self.self_energy[i][0]).sum();
        let mut self_energy: Vec<Vec<f64>> =
            kept.iter().map(|&i| self.self_energy[i].clone()).collect();
        let new_index: BTreeMap<usize, usize> =
            kept.iter().enumerate().map(|(k, &i)| (i, k)).collect();

        let mut pairs = BTreeMap::new();
        for (&(i, j), t) in &self.pairs {
            match (new_index.get(&i), new_index.get(&j)) {
                (Some(&a), Some(&b)) => {
                    pairs.insert((a, b), t.clone());
                }
                (Some(&a), None) => {
                    for (alpha, e) in self_energy[a].iter_mut().enumerate() {
                        *e += t.get(alpha, 0);
                    }
                }
                (None, Some(&b)) => {
                    for (beta, e) in self_energy[b].iter_mut().enumerate() {
                        *e += t.get(0, beta);
                    }
                }
                (None, None) => constant += t.get(0, 0),
            }
        }

        // Removing a residue can make two kept residues index-adjacent that were
        // not before, so the reduced problem keeps the flag only when no pair
        // table ends up at distance > 1.
        let nn = self.nearest_neighbor_only && pairs.keys().all(|&(a, b)| b - a == 1);
        let reduced = Self::from_tables(self_energy, pairs, nn)?;
        Ok(FrozenProblem {
            problem: reduced,
            kept,
            constant,
        })
    }
}

/// A problem with single-rotamer residues removed.
#[derive(Debug, Clone, PartialEq)]
pub struct FrozenProblem {
    pub problem: RotamerProblem,
    /// Original residue index of each remaining residue.
    pub kept: Vec<usize>,
    /// Energy contributed by the removed residues.
    pub constant: f64,
}

impl FrozenProblem {
    /// Expand a reduced configuration to the original residue indexing.
    pub fn expand(&self, reduced: &[usize], original_residues: usize) -> Vec<usize> {
        let mut full = vec![0; original_residues];
        for (&i, &a) in self.kept.iter().zip(reduced) {
            full[i] = a;
        }
        full
    }
}

fn check_index(sizes: &[usize], residue: usize, rotamer: usize) -> Result<()> {
    if residue >= sizes.len() {
        return Err(Error::IndexOutOfRange(format!(
            "residue {residue} (problem has {})",
            sizes.len()
        )));
    }
    if rotamer >= sizes[residue] {
        return Err(Error::IndexOutOfRange(format!(
            "rotamer {rotamer} of residue {residue} (has {})",
            sizes[residue]
        )));
    }
    Ok(())
}

fn check_finite(v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidProblem(format!("non-finite energy {v}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_BY_TWO: &str = r#"{
        "num_residues": 2,
        "rotamers_per_residue": [2, 2],
        "nearest_neighbor_only": true,
        "self_energy": [
            {"residue": 0, "rotamer": 0, "energy": 0.0},
            {"residue": 0, "rotamer": 1, "energy": 0.0},
            {"residue": 1, "rotamer": 0, "energy": 0.0},
            {"residue": 1, "rotamer": 1, "energy": 0.0}
        ],
        "pair_energy": []
    }"#;

    fn self_rows(sizes: &[usize]) -> Vec<SelfEnergy> {
        sizes
            .iter()
            .enumerate()
            .flat_map(|(i, &n)| {
                (0..n).map(move |a| SelfEnergy {
                    residue: i,
                    rotamer: a,
                    energy: (i * 10 + a) as f64,
                })
            })
            .collect()
    }

    #[test]
    fn zero_problem_loads() {
        let p = RotamerProblem::from_json_str(TWO_BY_TWO).unwrap();
        assert_eq!(p.dimension(), 4);
        assert_eq!(p.block_offsets(), &[0, 2]);
        assert_eq!(p.energy(&[1, 1]), 0.0);
        assert_eq!(p.pair_tables().count(), 0);
    }

    #[test]
    fn conflicting_orientations_are_rejected() {
        let pairs = [
            PairEnergy { res_i: 0, rot_i: 0, res_j: 1, rot_j: 1, energy: -1.0 },
            PairEnergy { res_i: 1, rot_i: 1, res_j: 0, rot_j: 0, energy: -2.0 },
        ];
        let err = RotamerProblem::from_entries(vec![2, 2], &self_rows(&[2, 2]), &pairs, true)
            .unwrap_err();
        assert!(matches!(err, Error::AsymmetricPair { .. }), "{err}");
    }

    #[test]
    fn agreeing_orientations_are_accepted() {
        let pairs = [
            PairEnergy { res_i: 0, rot_i: 0, res_j: 1, rot_j: 1, energy: -1.0 },
            PairEnergy { res_i: 1, rot_i: 1, res_j: 0, rot_j: 0, energy: -1.0 + 1e-12 },
        ];
        let p = RotamerProblem::from_entries(vec![2, 2], &self_rows(&[2, 2]), &pairs, true)
            .unwrap();
        assert_eq!(p.pair_energy(1, 1, 0, 0), -1.0);
        assert_eq!(p.pair_energy(0, 0, 1, 1), -1.0);
    }

    #[test]
    fn missing_and_duplicate_self_energies() {
        let mut rows = self_rows(&[2, 2]);
        rows.pop();
        let err = RotamerProblem::from_entries(vec![2, 2], &rows, &[], true).unwrap_err();
        assert!(matches!(err, Error::MissingSelfEnergy { residue: 1, rotamer: 1 }));

        let mut rows = self_rows(&[2, 2]);
        rows.push(rows[0]);
        let err = RotamerProblem::from_entries(vec![2, 2], &rows, &[], true).unwrap_err();
        assert!(matches!(err, Error::DuplicateSelfEnergy { residue: 0, rotamer: 0 }));
    }

    #[test]
    fn non_adjacent_pairs_need_full_mode() {
        let pairs = [PairEnergy { res_i: 0, rot_i: 0, res_j: 2, rot_j: 0, energy: 0.5 }];
        let rows = self_rows(&[2, 2, 2]);
        let err = RotamerProblem::from_entries(vec![2, 2, 2], &rows, &pairs, true).unwrap_err();
        assert!(matches!(err, Error::NonAdjacentPair { res_i: 0, res_j: 2 }));
        let p = RotamerProblem::from_entries(vec![2, 2, 2], &rows, &pairs, false).unwrap();
        assert_eq!(p.energy(&[0, 0, 0]), 0.0 + 10.0 + 20.0 + 0.5);
    }

    #[test]
    fn out_of_range_indices() {
        let pairs = [PairEnergy { res_i: 0, rot_i: 5, res_j: 1, rot_j: 0, energy: 0.5 }];
        let rows = self_rows(&[2, 2]);
        assert!(matches!(
            RotamerProblem::from_entries(vec![2, 2], &rows, &pairs, true),
            Err(Error::IndexOutOfRange(_))
        ));
    }

    #[test]
    fn num_residues_must_match_list() {
        let text = TWO_BY_TWO.replace("\"num_residues\": 2", "\"num_residues\": 3");
        assert!(RotamerProblem::from_json_str(&text).is_err());
    }

    #[test]
    fn csv_and_json_agree() {
        let csv_text = "\
kind,res_i,rot_i,res_j,rot_j,energy
self,0,0,,,1.5
self,0,1,,,-0.5
self,1,0,,,0.25
self,1,1,,,2.0
self,1,2,,,0.0
pair,0,1,1,2,-1.25
pair,1,0,0,0,0.75
";
        let from_csv = RotamerProblem::from_csv_reader(csv_text.as_bytes(), true).unwrap();
        assert_eq!(from_csv.rotamers_per_residue(), &[2, 3]);
        let json = from_csv.to_json_string().unwrap();
        let from_json = RotamerProblem::from_json_str(&json).unwrap();
        assert_eq!(from_csv, from_json);
        assert_eq!(from_json.energy(&[1, 2]), -0.5 + 0.0 - 1.25);
        assert_eq!(from_json.energy(&[0, 0]), 1.5 + 0.25 + 0.75);
    }

    #[test]
    fn freezing_preserves_energies() {
        let sizes = [3, 1, 2, 1];
        let rows = self_rows(&sizes);
        let mut pairs = Vec::new();
        for (i, j) in [(0, 1), (1, 2), (2, 3)] {
            for a in 0..sizes[i] {
                for b in 0..sizes[j] {
                    pairs.push(PairEnergy {
                        res_i: i,
                        rot_i: a,
                        res_j: j,
                        rot_j: b,
                        energy: 0.1 * (i + 2 * j + 3 * a + 5 * b) as f64,
                    });
                }
            }
        }
        let p = RotamerProblem::from_entries(sizes.to_vec(), &rows, &pairs, true).unwrap();
        let frozen = p.freeze_single_rotamer_residues().unwrap();
        assert_eq!(frozen.kept, vec![0, 2]);
        for a in 0..3 {
            for c in 0..2 {
                let full = frozen.expand(&[a, c], 4);
                let expect = p.energy(&full);
                let got = frozen.problem.energy(&[a, c]) + frozen.constant;
                assert!((expect - got).abs() < 1e-12);
            }
        }
    }
}
