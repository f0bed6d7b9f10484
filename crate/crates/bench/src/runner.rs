//! Runs a plan cell by cell into a results directory.
//!
//! Layout of a results directory:
//!
//! * `plan.json` – the plan as run
//! * `instances/N{N}_n{n}.json` – problem instance, plus `.oracle.json`
//! * `cells/<key>.records.jsonl` – one run record per trajectory
//! * `cells/<key>.summary.json` – ensemble summary, written last
//! * `index.json` – keys of the plan's cells, in report order
//!
//! A cell's key ends in the SHA-256 of its resolved configuration, and a
//! cell whose summary exists with that hash is not rerun.

use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use rotaq_core::baselines::{brute_force, sa_ensemble, GroundTarget, OracleResult};
use rotaq_core::circuit::Regime;
use rotaq_core::energy::RotamerProblem;
use rotaq_core::qaoa::run_ensemble;
use rotaq_core::record::{write_jsonl, EnsembleSummary, Method, RunRecord};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::fit::ScalingPoint;
use crate::plan::{Plan, SizeSpec, Solver};
use crate::{BenchError, Result};

/// Everything that determines a cell's results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSpec {
    pub label: String,
    pub method: Method,
    #[serde(rename = "N")]
    pub residues: usize,
    #[serde(rename = "n")]
    pub rotamers: usize,
    #[serde(rename = "M")]
    pub num_qubits: usize,
    pub trajectories: usize,
    /// SHA-256 of the instance JSON.
    pub instance: String,
    pub ground_energy: f64,
    pub solver: Solver,
}

impl CellSpec {
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("cell spec serializes");
        hex::encode(Sha256::digest(bytes))
    }

    pub fn key(&self) -> String {
        let label: String = self
            .label
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
            .collect();
        format!("{label}_N{}_n{}_{}", self.residues, self.rotamers, &self.hash()[..12])
    }

    pub fn regime(&self) -> Option<Regime> {
        match &self.solver {
            Solver::Qaoa(c) => Some(c.regime),
            Solver::Anneal(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub hash: String,
    pub fit_start_m: usize,
    pub spec: CellSpec,
    pub summary: EnsembleSummary,
    pub invalid_samples: u64,
}

impl CellSummary {
    pub fn point(&self) -> Option<ScalingPoint> {
        Some(ScalingPoint {
            m: self.spec.num_qubits,
            cost: self.summary.mean_cost?,
            std: self.summary.std_cost.unwrap_or(0.0),
        })
    }
}

/// Worker count from `BENCH_WORKERS`, if set to a positive integer.
pub fn workers_from_env() -> Result<Option<usize>> {
    match std::env::var("BENCH_WORKERS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(BenchError::Plan(format!("BENCH_WORKERS={v:?} is not a positive integer"))),
        },
        Err(_) => Ok(None),
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunOutcome {
    pub computed: Vec<String>,
    pub skipped: Vec<String>,
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut v = serde_json::to_vec_pretty(value)?;
    v.push(b'\n');
    Ok(v)
}

struct Instance {
    size: SizeSpec,
    problem: RotamerProblem,
    hash: String,
    ground_energy: f64,
}

fn prepare_instance(plan: &Plan, size: &SizeSpec, dir: &Path) -> Result<Instance> {
    let (n_res, n_rot) = (size.residues, size.rotamers);
    let problem = match &size.problem {
        Some(path) => RotamerProblem::load(path, true)?,
        None => plan.generator(n_res, n_rot).generate()?,
    };
    if problem.num_residues() != n_res || problem.rotamers_per_residue().iter().any(|&r| r != n_rot) {
        return Err(BenchError::Plan(format!(
            "instance for N={n_res} n={n_rot} has shape {:?}",
            problem.rotamers_per_residue()
        )));
    }
    let json = problem.to_json_string()?;
    let stem = format!("N{n_res}_n{n_rot}");
    write_atomic(&dir.join(format!("{stem}.json")), json.as_bytes())?;
    let ground_energy = match size.ground_energy {
        Some(e) => e,
        None => {
            let oracle: OracleResult = brute_force(&problem).map_err(|e| {
                BenchError::Plan(format!("N={n_res} n={n_rot}: {e}; supply ground_energy for this size"))
            })?;
            write_atomic(&dir.join(format!("{stem}.oracle.json")), &to_json(&oracle)?)?;
            oracle.ground_energy
        }
    };
    Ok(Instance {
        size: size.clone(),
        hash: hex::encode(Sha256::digest(json.as_bytes())),
        problem,
        ground_energy,
    })
}

fn read_summary(path: &Path) -> Result<CellSummary> {
    Ok(serde_json::from_reader(BufReader::new(fs::File::open(path)?))?)
}

fn run_cell(problem: &RotamerProblem, spec: &CellSpec) -> Result<Vec<RunRecord>> {
    Ok(match &spec.solver {
        Solver::Qaoa(cfg) => run_ensemble(problem, cfg, spec.trajectories)?.records,
        Solver::Anneal(a) => {
            sa_ensemble(problem, a, None, GroundTarget::new(spec.ground_energy), spec.trajectories)?.records
        }
    })
}

/// Execute every cell of `plan` not already complete in `out`.
pub fn run_experiment(plan: &Plan, out: &Path, workers: Option<usize>) -> Result<RunOutcome> {
    let inst_dir = out.join("instances");
    let cell_dir = out.join("cells");
    fs::create_dir_all(&inst_dir)?;
    fs::create_dir_all(&cell_dir)?;
    write_atomic(&out.join("plan.json"), &to_json(plan)?)?;

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        builder = builder.num_threads(w);
    }
    let pool = builder.build().map_err(|e| BenchError::Plan(e.to_string()))?;

    pool.install(|| {
        let instances = plan
            .sizes()
            .par_iter()
            .map(|s| prepare_instance(plan, s, &inst_dir))
            .collect::<Result<Vec<_>>>()?;

        let mut cells: Vec<(usize, CellSpec, usize)> = Vec::new();
        for (i, inst) in instances.iter().enumerate() {
            for m in &plan.methods {
                let spec = CellSpec {
                    label: m.label(),
                    method: m.kind,
                    residues: inst.size.residues,
                    rotamers: inst.size.rotamers,
                    num_qubits: inst.problem.dimension(),
                    trajectories: m.trajectories,
                    instance: inst.hash.clone(),
                    ground_energy: inst.ground_energy,
                    solver: m.solver(plan.seed, inst.problem.dimension(), inst.ground_energy),
                };
                cells.push((i, spec, m.fit_start()));
            }
        }
        // Report order: method as listed in the plan, then size.
        let order: Vec<String> = plan.methods.iter().map(|m| m.label()).collect();
        cells.sort_by_key(|(i, spec, _)| (order.iter().position(|l| *l == spec.label), *i));
        let keys: Vec<String> = cells.iter().map(|(_, s, _)| s.key()).collect();

        let mut outcome = RunOutcome::default();
        let mut todo = Vec::new();
        for (i, spec, fit_start) in cells {
            let key = spec.key();
            let path = cell_dir.join(format!("{key}.summary.json"));
            let done = path.exists() && read_summary(&path).is_ok_and(|s| s.hash == spec.hash());
            if done {
                outcome.skipped.push(key);
            } else {
                todo.push((i, spec, fit_start));
            }
        }

        let computed = todo
            .par_iter()
            .map(|(i, spec, fit_start)| {
                let start = Instant::now();
                let key = spec.key();
                let records = run_cell(&instances[*i].problem, spec)?;
                let mut buf = Vec::new();
                write_jsonl(&mut buf, &records)?;
                write_atomic(&cell_dir.join(format!("{key}.records.jsonl")), &buf)?;
                let summary = CellSummary {
                    hash: spec.hash(),
                    fit_start_m: *fit_start,
                    spec: spec.clone(),
                    summary: EnsembleSummary::from_records(&records),
                    invalid_samples: records.iter().map(|r| r.invalid_samples).sum(),
                };
                write_atomic(&cell_dir.join(format!("{key}.summary.json")), &to_json(&summary)?)?;
                eprintln!(
                    "{key}: {}/{} converged in {:.1}s",
                    summary.summary.converged,
                    summary.summary.trajectories,
                    start.elapsed().as_secs_f64()
                );
                Ok(key)
            })
            .collect::<Result<Vec<_>>>()?;
        outcome.computed = computed;

        write_atomic(&out.join("index.json"), &to_json(&keys)?)?;
        Ok(outcome)
    })
}

/// The summaries of a results directory, in report order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Dataset {
    pub root: PathBuf,
    pub cells: Vec<CellSummary>,
}

impl Dataset {
    /// Load the cells listed in `index.json`; no index means an empty dataset.
    pub fn load(root: impl AsRef<Path>) -> Result<Self> {
        let root = root.as_ref().to_path_buf();
        if !root.is_dir() {
            return Err(BenchError::Plan(format!("{} is not a directory", root.display())));
        }
        let index = root.join("index.json");
        if !index.exists() {
            return Ok(Self { root, cells: Vec::new() });
        }
        let keys: Vec<String> = serde_json::from_reader(BufReader::new(fs::File::open(&index)?))?;
        let mut cells = Vec::with_capacity(keys.len());
        for key in keys {
            let path = root.join("cells").join(format!("{key}.summary.json"));
            if path.exists() {
                cells.push(read_summary(&path)?);
            }
        }
        Ok(Self { root, cells })
    }

    /// Method labels in first-appearance order.
    pub fn labels(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for c in &self.cells {
            if !out.contains(&c.spec.label) {
                out.push(c.spec.label.clone());
            }
        }
        out
    }

    pub fn cells_for<'a>(&'a self, label: &'a str) -> impl Iterator<Item = &'a CellSummary> + 'a {
        self.cells.iter().filter(move |c| c.spec.label == label)
    }

    /// Scaling points of one label, skipping cells where nothing converged.
    pub fn points(&self, label: &str) -> Vec<ScalingPoint> {
        self.cells_for(label).filter_map(CellSummary::point).collect()
    }

    pub fn method(&self, label: &str) -> Option<Method> {
        self.cells_for(label).next().map(|c| c.spec.method)
    }

    pub fn fit_start(&self, label: &str) -> Option<usize> {
        self.cells_for(label).next().map(|c| c.fit_start_m)
    }

    /// Trajectory records of one cell.
    pub fn records(&self, cell: &CellSummary) -> Result<Vec<RunRecord>> {
        let path = self.root.join("cells").join(format!("{}.records.jsonl", cell.spec.key()));
        let f = fs::File::open(path)?;
        Ok(rotaq_core::record::read_jsonl(BufReader::new(f))?)
    }
}
