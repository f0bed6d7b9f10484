//! Annealing baselines on rotamer problems and their ensembles.

use std::ops::ControlFlow;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::discrete::{discrete_anneal, DiscreteSaConfig};
use super::dual_annealing::{generalized_annealing, AnnealObjective, SaConfig};
use crate::energy::{build_qubo, Bitstring, Decoded, Penalty, QuboMatrix, RotamerProblem};
use crate::record::{EnsembleSummary, FirstHit, Method, RunRecord};
use crate::rng::{stream, trajectory_seed, Stream};
use crate::{Error, Result};

/// Success test: a valid configuration within `tol` of `energy`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroundTarget {
    pub energy: f64,
    pub tol: f64,
}

impl GroundTarget {
    pub fn new(energy: f64) -> Self {
        Self { energy, tol: 1e-9 }
    }

    pub fn matches(&self, e: f64) -> bool {
        (e - self.energy).abs() <= self.tol
    }
}

/// Bookkeeping shared by the annealers: evaluation count, best valid
/// configuration and the first hit of the target.
pub(crate) struct Tally<'a> {
    pub problem: &'a RotamerProblem,
    pub target: Option<GroundTarget>,
    pub evaluations: u64,
    pub iteration: u64,
    pub iteration_start: u64,
    pub best: Option<(f64, Bitstring, Vec<usize>)>,
    pub hit: Option<FirstHit>,
    pub invalid: u64,
}

impl<'a> Tally<'a> {
    pub fn new(problem: &'a RotamerProblem, target: Option<GroundTarget>) -> Self {
        Self {
            problem,
            target,
            evaluations: 0,
            iteration: 1,
            iteration_start: 0,
            best: None,
            hit: None,
            invalid: 0,
        }
    }

    /// Record one evaluation of `bits`. `Break` when it hits the target.
    pub fn observe(&mut self, bits: &Bitstring) -> ControlFlow<()> {
        self.evaluations += 1;
        match self.problem.layout().decode(bits) {
            Ok(Decoded::Valid(c)) => self.observe_valid(*bits, c),
            _ => {
                self.invalid += 1;
                ControlFlow::Continue(())
            }
        }
    }

    pub fn observe_valid(&mut self, bits: Bitstring, config: Vec<usize>) -> ControlFlow<()> {
        let e = self.problem.energy(&config);
        let hit = self.target.is_some_and(|t| t.matches(e));
        if hit || self.best.as_ref().is_none_or(|b| e < b.0) {
            self.best = Some((e, bits, config));
        }
        if hit {
            self.hit = Some(FirstHit {
                iteration: self.iteration,
                shot: self.evaluations - self.iteration_start - 1,
            });
            return ControlFlow::Break(());
        }
        ControlFlow::Continue(())
    }

    pub fn next_iteration(&mut self) {
        self.iteration += 1;
        self.iteration_start = self.evaluations;
    }

    pub fn into_record(self, method: Method, seed: u64, trajectory_id: u64, iterations: u64, start: Instant) -> RunRecord {
        let converged = self.hit.is_some();
        RunRecord {
            method,
            regime: None,
            trajectory_id,
            seed,
            iterations_used: iterations,
            shots_per_iteration: 0,
            total_shots: 0,
            cost: self.evaluations,
            first_hit: self.hit,
            converged,
            best_energy: self.best.as_ref().map(|b| b.0),
            best_bitstring: self.best.as_ref().map(|b| b.1),
            best_configuration: self.best.map(|b| b.2),
            invalid_samples: self.invalid,
            wall_time: start.elapsed().as_secs_f64(),
            backend: None,
        }
    }
}

fn round(y: &[f64]) -> Bitstring {
    let bits: Vec<bool> = y.iter().map(|&v| v >= 0.5).collect();
    Bitstring::from_bits(&bits).expect("dimension checked against the bit limit")
}

/// Penalized QUBO energy of the rounded point, with bit-flip descent as the
/// local search.
struct RoundedQubo<'a, 'b> {
    qubo: &'a QuboMatrix,
    tally: &'a mut Tally<'b>,
}

impl RoundedQubo<'_, '_> {
    fn energy(&mut self, bits: &Bitstring) -> ControlFlow<(), f64> {
        self.tally.observe(bits)?;
        ControlFlow::Continue(self.qubo.energy(bits))
    }
}

impl AnnealObjective for RoundedQubo<'_, '_> {
    fn eval(&mut self, y: &[f64]) -> ControlFlow<(), f64> {
        self.energy(&round(y))
    }

    fn end_iteration(&mut self) {
        self.tally.next_iteration();
    }

    fn local_search(&mut self, y: &[f64], e: f64) -> ControlFlow<(), (f64, Vec<f64>)> {
        let mut bits = round(y);
        let mut best = e;
        loop {
            let mut improved = false;
            for i in 0..bits.len() {
                let trial = bits.flipped(i);
                let v = self.energy(&trial)?;
                if v < best {
                    best = v;
                    bits = trial;
                    improved = true;
                }
            }
            if !improved {
                break;
            }
        }
        let point = bits.iter().map(|b| if b { 0.75 } else { 0.25 }).collect();
        ControlFlow::Continue((best, point))
    }
}

/// One dual-annealing trajectory on the penalized QUBO of `problem`
/// (default penalty unless given). Stops at the first evaluation of a valid
/// configuration matching `target`.
pub fn dual_anneal(
    problem: &RotamerProblem,
    config: &SaConfig,
    penalty: Option<Penalty>,
    target: Option<GroundTarget>,
    trajectory_id: u64,
) -> Result<RunRecord> {
    let qubo = build_qubo(problem, Some(penalty.unwrap_or_else(|| Penalty::default_for(problem))))?;
    dual_anneal_qubo(problem, &qubo, config, target, trajectory_id)
}

fn dual_anneal_qubo(
    problem: &RotamerProblem,
    qubo: &QuboMatrix,
    config: &SaConfig,
    target: Option<GroundTarget>,
    trajectory_id: u64,
) -> Result<RunRecord> {
    let start = Instant::now();
    let seed = trajectory_seed(config.seed, trajectory_id);
    let mut rng = stream(seed, Stream::Annealing);
    let mut tally = Tally::new(problem, target);
    let mut obj = RoundedQubo { qubo, tally: &mut tally };
    let r = generalized_annealing(qubo.dimension(), config, &mut rng, &mut obj)?;
    // An interrupted run stopped inside its current iteration.
    let iterations = if r.interrupted { tally.iteration } else { r.iterations as u64 };
    Ok(tally.into_record(Method::Sa, seed, trajectory_id, iterations, start))
}

/// Which annealer an ensemble runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Annealer {
    Dual(SaConfig),
    Discrete(DiscreteSaConfig),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SaEnsemble {
    pub records: Vec<RunRecord>,
    pub summary: EnsembleSummary,
}

impl SaEnsemble {
    pub fn success_ratio(&self) -> f64 {
        self.summary.convergence_ratio
    }

    /// Mean evaluations over successful runs divided by the success ratio.
    pub fn normalized_cost(&self) -> Option<f64> {
        self.summary.mean_cost
    }
}

/// Independent trajectories `0..num_trajectories` against a known ground
/// energy, in parallel.
pub fn sa_ensemble(
    problem: &RotamerProblem,
    annealer: &Annealer,
    penalty: Option<Penalty>,
    target: GroundTarget,
    num_trajectories: usize,
) -> Result<SaEnsemble> {
    if num_trajectories == 0 {
        return Err(Error::InvalidConfig("an ensemble needs at least one trajectory".into()));
    }
    let qubo = match annealer {
        Annealer::Dual(_) => Some(build_qubo(
            problem,
            Some(penalty.unwrap_or_else(|| Penalty::default_for(problem))),
        )?),
        Annealer::Discrete(_) => None,
    };
    let records = (0..num_trajectories as u64)
        .into_par_iter()
        .map(|id| match annealer {
            Annealer::Dual(cfg) => dual_anneal_qubo(problem, qubo.as_ref().unwrap(), cfg, Some(target), id),
            Annealer::Discrete(cfg) => discrete_anneal(problem, cfg, Some(target), id),
        })
        .collect::<Result<Vec<_>>>()?;
    let summary = EnsembleSummary::from_records(&records);
    Ok(SaEnsemble { records, summary })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::brute_force;
    use crate::energy::{InstanceGenerator, SelfEnergy};

    fn separable(sizes: &[usize]) -> RotamerProblem {
        let s: Vec<SelfEnergy> = sizes
            .iter()
            .enumerate()
            .flat_map(|(residue, &n)| {
                (0..n).map(move |rotamer| SelfEnergy {
                    residue,
                    rotamer,
                    energy: if rotamer == 0 { -1.0 } else { 0.0 },
                })
            })
            .collect();
        RotamerProblem::from_entries(sizes.to_vec(), &s, &[], true).unwrap()
    }

    #[test]
    fn separable_instance_is_solved() {
        let p = separable(&[3, 3, 3, 3]);
        let target = GroundTarget::new(-4.0);
        let mut solved = 0;
        for seed in 0..100 {
            let cfg = SaConfig { seed, ..SaConfig::default() };
            let r = dual_anneal(&p, &cfg, None, Some(target), 0).unwrap();
            if r.converged {
                solved += 1;
                assert_eq!(r.best_configuration, Some(vec![0; 4]));
            }
        }
        assert!(solved >= 99, "{solved}/100");
    }

    #[test]
    fn converged_means_ground_energy() {
        let p = InstanceGenerator::uniform(4, 3, 17).generate().unwrap();
        let g = brute_force(&p).unwrap().ground_energy;
        let ens = sa_ensemble(&p, &Annealer::Dual(SaConfig::default()), None, GroundTarget::new(g), 20).unwrap();
        assert!(ens.summary.converged > 0);
        for r in &ens.records {
            if r.converged {
                assert!((r.best_energy.unwrap() - g).abs() <= 1e-9);
                let hit = r.first_hit.unwrap();
                assert!(hit.iteration <= r.iterations_used.max(1));
            } else {
                assert!(r.best_energy.is_none_or(|e| e > g + 1e-9));
            }
        }
    }

    #[test]
    fn without_target_runs_the_full_schedule() {
        let p = InstanceGenerator::uniform(3, 2, 3).generate().unwrap();
        let cfg = SaConfig {
            max_iterations: 40,
            ..SaConfig::default()
        };
        let r = dual_anneal(&p, &cfg, None, None, 0).unwrap();
        assert!(!r.converged);
        assert_eq!(r.iterations_used, 40);
        assert!(r.cost > 40 * 2 * 6);
    }

    #[test]
    fn seeds_reproduce() {
        let p = InstanceGenerator::uniform(3, 3, 1).generate().unwrap();
        let g = brute_force(&p).unwrap().ground_energy;
        let a = dual_anneal(&p, &SaConfig::default(), None, Some(GroundTarget::new(g)), 5).unwrap();
        let b = dual_anneal(&p, &SaConfig::default(), None, Some(GroundTarget::new(g)), 5).unwrap();
        assert_eq!(a, b);
    }
}
