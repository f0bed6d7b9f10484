//! Per-trajectory run records, shared by the quantum and classical solvers
//! and written as JSON lines.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::circuit::Regime;
use crate::energy::Bitstring;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    SvQaoa,
    MpsQaoa,
    /// Dual annealing over the relaxed box.
    Sa,
    /// Single-bit-flip annealing restricted to valid strings.
    SaDiscrete,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::SvQaoa, Method::MpsQaoa, Method::Sa, Method::SaDiscrete];

    pub fn name(self) -> &'static str {
        match self {
            Method::SvQaoa => "sv-qaoa",
            Method::MpsQaoa => "mps-qaoa",
            Method::Sa => "sa",
            Method::SaDiscrete => "sa-discrete",
        }
    }

    pub fn is_quantum(self) -> bool {
        matches!(self, Method::SvQaoa | Method::MpsQaoa)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown method {s:?}")))
    }
}

/// Where in the run the ground state first showed up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FirstHit {
    /// 1-based iteration.
    pub iteration: u64,
    /// 0-based shot (QAOA) or evaluation (annealing) index within that iteration.
    pub shot: u64,
}

/// One trajectory. `cost` is circuits executed for QAOA (equal to
/// `total_shots`) and objective evaluations for annealing.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub method: Method,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regime: Option<Regime>,
    pub trajectory_id: u64,
    pub seed: u64,
    pub iterations_used: u64,
    pub shots_per_iteration: u64,
    pub total_shots: u64,
    pub cost: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first_hit: Option<FirstHit>,
    pub converged: bool,
    /// Lowest energy among valid configurations seen; `None` if none was seen.
    pub best_energy: Option<f64>,
    pub best_bitstring: Option<Bitstring>,
    pub best_configuration: Option<Vec<usize>>,
    /// Samples that were not one-hot per block.
    #[serde(default)]
    pub invalid_samples: u64,
    pub wall_time: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub backend: Option<BackendRecord>,
}

/// Simulator settings and diagnostics for QAOA records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackendRecord {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_bond: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    pub max_bond_reached: usize,
    pub discarded_weight: f64,
}

impl PartialEq for RunRecord {
    /// Everything but wall time.
    fn eq(&self, o: &Self) -> bool {
        self.method == o.method
            && self.regime == o.regime
            && self.trajectory_id == o.trajectory_id
            && self.seed == o.seed
            && self.iterations_used == o.iterations_used
            && self.shots_per_iteration == o.shots_per_iteration
            && self.total_shots == o.total_shots
            && self.cost == o.cost
            && self.first_hit == o.first_hit
            && self.converged == o.converged
            && self.best_energy.map(f64::to_bits) == o.best_energy.map(f64::to_bits)
            && self.best_bitstring == o.best_bitstring
            && self.best_configuration == o.best_configuration
            && self.invalid_samples == o.invalid_samples
            && self.backend == o.backend
    }
}

pub fn write_jsonl<W: Write>(mut w: W, records: &[RunRecord]) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_jsonl<R: BufRead>(r: R) -> Result<Vec<RunRecord>> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(
            serde_json::from_str(&line)
                .map_err(|e| Error::Parse(format!("record line {}: {e}", i + 1)))?,
        );
    }
    Ok(out)
}

/// Convergence statistics over a set of trajectories.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSummary {
    pub trajectories: usize,
    pub converged: usize,
    pub convergence_ratio: f64,
    /// Mean cost over converged trajectories divided by the ratio; `None`
    /// when nothing converged.
    pub mean_cost: Option<f64>,
    /// Standard deviation of the raw cost over converged trajectories,
    /// scaled the same way.
    pub std_cost: Option<f64>,
    pub mean_raw_cost: Option<f64>,
}

impl EnsembleSummary {
    pub fn from_records(records: &[RunRecord]) -> Self {
        let costs: Vec<f64> = records
            .iter()
            .filter(|r| r.converged)
            .map(|r| r.cost as f64)
            .collect();
        let total = records.len();
        let ratio = if total == 0 { 0.0 } else { costs.len() as f64 / total as f64 };
        let (mean_cost, std_cost, mean_raw) = if costs.is_empty() {
            (None, None, None)
        } else {
            let k = costs.len() as f64;
            let mean = costs.iter().sum::<f64>() / k;
            let var = if costs.len() > 1 {
                costs.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (k - 1.0)
            } else {
                0.0
            };
            (Some(mean / ratio), Some(var.sqrt() / ratio), Some(mean))
        };
        Self {
            trajectories: total,
            converged: costs.len(),
            convergence_ratio: ratio,
            mean_cost,
            std_cost,
            mean_raw_cost: mean_raw,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(id: u64, converged: bool, cost: u64) -> RunRecord {
        RunRecord {
            method: Method::SvQaoa,
            regime: Some(Regime::Xy),
            trajectory_id: id,
            seed: 7 + id,
            iterations_used: cost / 100,
            shots_per_iteration: 100,
            total_shots: cost,
            cost,
            first_hit: converged.then_some(FirstHit { iteration: cost / 100, shot: 3 }),
            converged,
            best_energy: Some(-1.5),
            best_bitstring: Some("0110".parse().unwrap()),
            best_configuration: Some(vec![1, 0]),
            invalid_samples: 0,
            wall_time: 0.25,
            backend: Some(BackendRecord {
                name: "statevector".into(),
                max_bond: None,
                threshold: None,
                max_bond_reached: 0,
                discarded_weight: 0.0,
            }),
        }
    }

    #[test]
    fn jsonl_round_trip() {
        let recs = vec![record(0, true, 300), record(1, false, 50_000)];
        let mut buf = Vec::new();
        write_jsonl(&mut buf, &recs).unwrap();
        assert_eq!(buf.iter().filter(|&&b| b == b'\n').count(), 2);
        assert_eq!(read_jsonl(&buf[..]).unwrap(), recs);
    }

    #[test]
    fn equality_ignores_wall_time() {
        let a = record(0, true, 100);
        let mut b = a.clone();
        b.wall_time = 99.0;
        assert_eq!(a, b);
        b.cost += 1;
        assert_ne!(a, b);
    }

    #[test]
    fn all_converge_at_one_iteration() {
        let recs: Vec<_> = (0..5).map(|i| record(i, true, 100)).collect();
        let s = EnsembleSummary::from_records(&recs);
        assert_eq!(s.convergence_ratio, 1.0);
        assert_eq!(s.mean_cost, Some(100.0));
    }

    #[test]
    fn normalized_by_ratio() {
        let mut recs: Vec<_> = (0..8).map(|i| record(i, true, 400 + 100 * i)).collect();
        recs.push(record(8, false, 1));
        recs.push(record(9, false, 1));
        let s = EnsembleSummary::from_records(&recs);
        let raw = (0..8).map(|i| 400.0 + 100.0 * i as f64).sum::<f64>() / 8.0;
        assert!((s.mean_cost.unwrap() - raw / 0.8).abs() < 1e-9);
    }

    #[test]
    fn nothing_converged_is_undefined() {
        let s = EnsembleSummary::from_records(&[record(0, false, 10)]);
        assert_eq!(s.convergence_ratio, 0.0);
        assert_eq!(s.mean_cost, None);
    }

    #[test]
    fn summary_ignores_trajectory_labels() {
        let recs: Vec<_> = (0..6).map(|i| record(i, i % 3 != 0, 100 * (i + 1))).collect();
        let mut relabeled = recs.clone();
        relabeled.reverse();
        for (k, r) in relabeled.iter_mut().enumerate() {
            r.trajectory_id = 100 + k as u64;
        }
        assert_eq!(EnsembleSummary::from_records(&recs), EnsembleSummary::from_records(&relabeled));
    }

    #[test]
    fn method_names() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
            assert_eq!(serde_json::to_string(&m).unwrap(), format!("\"{}\"", m.name()));
        }
    }
}
