//! The sample/evaluate/update loop and trajectory ensembles.

use std::ops::ControlFlow;
use std::time::Instant;

use rayon::prelude::*;

use super::config::{QaoaConfig, StopMode};
use super::cvar::cvar;
use super::optimizer::{minimize_with_restarts, Optimizer};
use super::params::init_params;
use crate::circuit::{assemble_ansatz, cost_hamiltonian, random_configuration, AnsatzSpec, Regime};
use crate::energy::{Bitstring, Decoded, IsingHamiltonian, RotamerProblem};
use crate::record::{BackendRecord, EnsembleSummary, FirstHit, Method, RunRecord};
use crate::rng::{stream, trajectory_seed, Stream};
use crate::sim::{sampler_for, Backend, Sampler, SimStats};
use crate::{Error, Result};

/// Problem-level data shared by every trajectory of one configuration.
pub struct QaoaRunner<'a> {
    problem: &'a RotamerProblem,
    config: QaoaConfig,
    hamiltonian: IsingHamiltonian,
    sampler: Box<dyn Sampler>,
    /// Objective value when post-selection leaves no valid sample.
    empty_fallback: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleResult {
    pub records: Vec<RunRecord>,
    pub summary: EnsembleSummary,
}

/// Largest energy any configuration can have, from per-table maxima.
fn energy_upper_bound(problem: &RotamerProblem) -> f64 {
    let own: f64 = problem
        .self_energies()
        .iter()
        .map(|v| v.iter().copied().fold(f64::NEG_INFINITY, f64::max))
        .sum();
    let pairs: f64 = problem
        .pair_tables()
        .map(|(_, t)| t.values().iter().copied().fold(f64::NEG_INFINITY, f64::max))
        .sum();
    own + pairs
}

impl<'a> QaoaRunner<'a> {
    pub fn new(problem: &'a RotamerProblem, config: QaoaConfig) -> Result<Self> {
        config.validate()?;
        let hamiltonian = cost_hamiltonian(problem, config.regime, config.penalty)?;
        let sampler = sampler_for(&config.backend, &hamiltonian)?;
        Ok(Self {
            problem,
            empty_fallback: energy_upper_bound(problem) + 1.0,
            config,
            hamiltonian,
            sampler,
        })
    }

    pub fn config(&self) -> &QaoaConfig {
        &self.config
    }

    pub fn hamiltonian(&self) -> &IsingHamiltonian {
        &self.hamiltonian
    }

    fn method(&self) -> Method {
        match self.config.backend {
            Backend::Statevector => Method::SvQaoa,
            Backend::Mps(_) => Method::MpsQaoa,
        }
    }

    /// One seeded trajectory.
    pub fn run(&self, trajectory_id: u64) -> Result<RunRecord> {
        let start = Instant::now();
        let cfg = &self.config;
        let seed = trajectory_seed(cfg.seed, trajectory_id);
        let layout = self.problem.layout();
        let mut spec = AnsatzSpec::new(cfg.regime, cfg.p, self.hamiltonian.clone())?;
        if cfg.random_initial_configuration && cfg.regime != Regime::Xy {
            let c = random_configuration(layout, &mut stream(seed, Stream::InitialState));
            spec = spec.with_initial_configuration(c)?;
        }
        let x0 = init_params(cfg.p, cfg.gamma_range, cfg.beta_range, &mut stream(seed, Stream::Parameters))?;
        let mut sample_rng = stream(seed, Stream::Sampling);
        let target = match cfg.stop_mode {
            StopMode::FirstGroundState { target_energy, tol } => Some((target_energy, tol)),
            StopMode::ParameterConvergence => None,
        };

        let mut iterations = 0u64;
        let mut invalid = 0u64;
        let mut hit: Option<FirstHit> = None;
        let mut best: Option<(f64, Bitstring, Vec<usize>)> = None;
        let mut stats = SimStats::default();
        let mut failure: Option<Error> = None;
        let mut energies = Vec::with_capacity(cfg.shots_per_iteration);

        let mut objective = |params: &[f64]| -> ControlFlow<(), f64> {
            iterations += 1;
            let step = assemble_ansatz(&spec, params).and_then(|c| {
                self.sampler
                    .sample(&c, cfg.shots_per_iteration, &mut sample_rng)
            });
            let (samples, s) = match step {
                Ok(v) => v,
                Err(e) => {
                    failure = Some(e);
                    return ControlFlow::Break(());
                }
            };
            stats = stats.merge(s);
            energies.clear();
            for (k, b) in samples.iter().enumerate() {
                let config = match layout.decode(b) {
                    Ok(Decoded::Valid(c)) => Some(c),
                    _ => None,
                };
                match config {
                    Some(c) => {
                        let e = self.problem.energy(&c);
                        if let Some((t, tol)) = target {
                            if (e - t).abs() <= tol {
                                hit = Some(FirstHit {
                                    iteration: iterations,
                                    shot: k as u64,
                                });
                                best = Some((e, *b, c));
                                return ControlFlow::Break(());
                            }
                        }
                        energies.push(if cfg.regime == Regime::Baseline { e } else { self.hamiltonian.energy(b) });
                        if best.as_ref().is_none_or(|(be, _, _)| e < *be) {
                            best = Some((e, *b, c));
                        }
                    }
                    None => {
                        invalid += 1;
                        if cfg.regime != Regime::Baseline {
                            energies.push(self.hamiltonian.energy(b));
                        }
                    }
                }
            }
            if energies.is_empty() {
                return ControlFlow::Continue(self.empty_fallback);
            }
            match cvar(&energies, cfg.cvar_alpha) {
                Ok(v) => ControlFlow::Continue(v),
                Err(e) => {
                    failure = Some(e);
                    ControlFlow::Break(())
                }
            }
        };

        let result = match cfg.stop_mode {
            StopMode::FirstGroundState { .. } => {
                minimize_with_restarts(&cfg.optimizer, &x0, cfg.max_iterations, &mut objective)
            }
            StopMode::ParameterConvergence => cfg.optimizer.minimize(&x0, cfg.max_iterations, &mut objective),
        };
        if let Some(e) = failure {
            return Err(e);
        }
        let converged = match cfg.stop_mode {
            StopMode::FirstGroundState { .. } => hit.is_some(),
            StopMode::ParameterConvergence => result.evaluations < cfg.max_iterations,
        };
        let shots = cfg.shots_per_iteration as u64;
        let backend = match cfg.backend {
            Backend::Statevector => BackendRecord {
                name: "statevector".into(),
                max_bond: None,
                threshold: None,
                max_bond_reached: stats.max_bond_reached,
                discarded_weight: stats.discarded_weight,
            },
            Backend::Mps(m) => BackendRecord {
                name: "mps".into(),
                max_bond: Some(m.max_bond),
                threshold: Some(m.threshold),
                max_bond_reached: stats.max_bond_reached,
                discarded_weight: stats.discarded_weight,
            },
        };
        Ok(RunRecord {
            method: self.method(),
            regime: Some(cfg.regime),
            trajectory_id,
            seed,
            iterations_used: iterations,
            shots_per_iteration: shots,
            total_shots: iterations * shots,
            cost: iterations * shots,
            first_hit: hit,
            converged,
            best_energy: best.as_ref().map(|b| b.0),
            best_bitstring: best.as_ref().map(|b| b.1),
            best_configuration: best.map(|b| b.2),
            invalid_samples: invalid,
            wall_time: start.elapsed().as_secs_f64(),
            backend: Some(backend),
        })
    }

    /// Trajectories `0..num_trajectories`, in parallel.
    pub fn run_ensemble(&self, num_trajectories: usize) -> Result<EnsembleResult> {
        if num_trajectories == 0 {
            return Err(Error::InvalidConfig("an ensemble needs at least one trajectory".into()));
        }
        let records = (0..num_trajectories as u64)
            .into_par_iter()
            .map(|id| self.run(id))
            .collect::<Result<Vec<_>>>()?;
        let summary = EnsembleSummary::from_records(&records);
        Ok(EnsembleResult { records, summary })
    }
}

/// Single trajectory with id 0.
pub fn optimize(problem: &RotamerProblem, config: &QaoaConfig) -> Result<RunRecord> {
    QaoaRunner::new(problem, config.clone())?.run(0)
}

pub fn run_ensemble(problem: &RotamerProblem, config: &QaoaConfig, num_trajectories: usize) -> Result<EnsembleResult> {
    QaoaRunner::new(problem, config.clone())?.run_ensemble(num_trajectories)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::{InstanceGenerator, SelfEnergy};
    use crate::sim::MpsConfig;

    fn ground(problem: &RotamerProblem) -> f64 {
        let sizes = problem.rotamers_per_residue().to_vec();
        let mut c = vec![0; sizes.len()];
        let mut best = f64::INFINITY;
        loop {
            best = best.min(problem.energy(&c));
            let mut i = 0;
            loop {
                if i == c.len() {
                    return best;
                }
                c[i] += 1;
                if c[i] < sizes[i] {
                    break;
                }
                c[i] = 0;
                i += 1;
            }
        }
    }

    fn sv_config(regime: Regime, p: usize, problem: &RotamerProblem, seed: u64) -> QaoaConfig {
        let mut c = QaoaConfig::new(
            regime,
            p,
            Backend::Statevector,
            problem.dimension(),
            StopMode::ground_state(ground(problem)),
        );
        c.seed = seed;
        c
    }

    #[test]
    fn single_residue_found_at_once() {
        let problem = RotamerProblem::from_entries(
            vec![2],
            &[
                SelfEnergy { residue: 0, rotamer: 0, energy: 0.0 },
                SelfEnergy { residue: 0, rotamer: 1, energy: 5.0 },
            ],
            &[],
            true,
        )
        .unwrap();
        for regime in Regime::ALL {
            let r = optimize(&problem, &sv_config(regime, 1, &problem, 1)).unwrap();
            assert!(r.converged, "{regime}");
            assert_eq!(r.iterations_used, 1, "{regime}");
            assert_eq!(r.best_configuration, Some(vec![0]));
            assert_eq!(r.best_bitstring.unwrap().to_string(), "10");
            assert_eq!(r.total_shots, r.shots_per_iteration);
        }
    }

    #[test]
    fn xy_two_by_two_always_converges() {
        let problem = InstanceGenerator::uniform(2, 2, 9).generate().unwrap();
        let cfg = QaoaConfig {
            shots_per_iteration: 100,
            ..sv_config(Regime::Xy, 4, &problem, 5)
        };
        let ens = run_ensemble(&problem, &cfg, 20).unwrap();
        assert_eq!(ens.summary.converged, 20);
        for r in &ens.records {
            assert_eq!(r.invalid_samples, 0);
            assert!((r.best_energy.unwrap() - ground(&problem)).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_hamiltonian_settles() {
        let zeros: Vec<SelfEnergy> = (0..2)
            .flat_map(|residue| (0..2).map(move |rotamer| SelfEnergy { residue, rotamer, energy: 0.0 }))
            .collect();
        let problem = RotamerProblem::from_entries(vec![2, 2], &zeros, &[], true).unwrap();
        let cfg = QaoaConfig::new(Regime::Xy, 1, Backend::Statevector, 4, StopMode::ParameterConvergence);
        let r = optimize(&problem, &cfg).unwrap();
        assert!(r.converged);
        assert!(r.iterations_used < cfg.max_iterations as u64);
        assert_eq!(r.best_energy, Some(0.0));
    }

    #[test]
    fn seeds_reproduce_records() {
        let problem = InstanceGenerator::uniform(3, 3, 4).generate().unwrap();
        for regime in Regime::ALL {
            let cfg = QaoaConfig {
                max_iterations: 30,
                ..sv_config(regime, 2, &problem, 8)
            };
            let runner = QaoaRunner::new(&problem, cfg).unwrap();
            assert_eq!(runner.run(3).unwrap(), runner.run(3).unwrap());
            assert_ne!(runner.run(3).unwrap().seed, runner.run(4).unwrap().seed);
        }
    }

    #[test]
    fn hits_are_valid_ground_states() {
        let problem = InstanceGenerator::uniform(3, 3, 21).generate().unwrap();
        let e0 = ground(&problem);
        for regime in Regime::ALL {
            let ens = run_ensemble(&problem, &sv_config(regime, 2, &problem, 2), 6).unwrap();
            for r in ens.records.iter().filter(|r| r.converged) {
                let hit = r.first_hit.unwrap();
                assert_eq!(hit.iteration, r.iterations_used);
                let c = r.best_configuration.as_ref().unwrap();
                assert_eq!(problem.encode(c).unwrap(), r.best_bitstring.unwrap());
                assert!((problem.energy(c) - e0).abs() < 1e-9);
                assert_eq!(r.total_shots, r.iterations_used * r.shots_per_iteration);
            }
        }
    }

    #[test]
    fn budget_exhaustion_is_not_an_error() {
        let problem = InstanceGenerator::uniform(3, 3, 2).generate().unwrap();
        let cfg = QaoaConfig {
            stop_mode: StopMode::ground_state(-1e9),
            max_iterations: 12,
            ..sv_config(Regime::Penalty, 1, &problem, 0)
        };
        let r = optimize(&problem, &cfg).unwrap();
        assert!(!r.converged);
        assert_eq!(r.iterations_used, 12);
        assert_eq!(r.cost, 12 * r.shots_per_iteration);
    }

    #[test]
    fn mps_backend_runs() {
        let problem = InstanceGenerator::uniform(3, 3, 6).generate().unwrap();
        let cfg = QaoaConfig {
            backend: Backend::Mps(MpsConfig::default()),
            shots_per_iteration: 200,
            ..sv_config(Regime::Xy, 2, &problem, 1)
        };
        let r = optimize(&problem, &cfg).unwrap();
        assert!(r.converged);
        assert_eq!(r.method, Method::MpsQaoa);
        let b = r.backend.unwrap();
        assert_eq!(b.name, "mps");
        assert!(b.max_bond_reached >= 1);
    }
}
