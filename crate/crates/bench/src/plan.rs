//! Experiment plans: which instances, which methods, how many trajectories.
//!
//! A plan is a TOML document:
//!
//! ```toml
//! name = "five-residue sweep"
//! seed = 7
//!
//! [grid]
//! residues = [5]
//! rotamers = [3, 4, 5]
//!
//! [[method]]
//! kind = "mps-qaoa"
//! trajectories = 20
//! p = 4
//! shots = 1000
//!
//! [[method]]
//! kind = "sa"
//! trajectories = 500
//! ```

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use rotaq_core::baselines::{Annealer, DiscreteSaConfig, SaConfig};
use rotaq_core::circuit::Regime;
use rotaq_core::energy::InstanceGenerator;
use rotaq_core::qaoa::{default_max_iterations, default_shots, OptimizerKind, QaoaConfig, StopMode};
use rotaq_core::record::Method;
use rotaq_core::sim::{Backend, MpsConfig};
use serde::{Deserialize, Serialize};

use crate::{BenchError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Plan {
    #[serde(default)]
    pub name: String,
    /// Base seed for generated instances and, unless overridden, methods.
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub instances: InstanceSettings,
    /// Every `(residues, rotamers)` combination.
    #[serde(default)]
    pub grid: Option<Grid>,
    /// Individual sizes, optionally with a problem file or known ground energy.
    #[serde(default, rename = "size")]
    pub sizes: Vec<SizeSpec>,
    #[serde(rename = "method")]
    pub methods: Vec<MethodSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InstanceSettings {
    pub self_range: (f64, f64),
    pub pair_range: (f64, f64),
    pub long_range_decay: Option<f64>,
}

impl Default for InstanceSettings {
    fn default() -> Self {
        let g = InstanceGenerator::default();
        Self {
            self_range: g.self_range,
            pair_range: g.pair_range,
            long_range_decay: g.long_range_decay,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub residues: Vec<usize>,
    pub rotamers: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SizeSpec {
    pub residues: usize,
    pub rotamers: usize,
    /// Problem file (JSON or CSV) used instead of a generated instance,
    /// relative to the plan file.
    #[serde(default)]
    pub problem: Option<PathBuf>,
    /// Reference ground energy; required when exhaustive search is too large.
    #[serde(default)]
    pub ground_energy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodSpec {
    pub kind: Method,
    /// Name in reports; defaults to the method name. Must be unique.
    #[serde(default)]
    pub label: Option<String>,
    pub trajectories: usize,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Smallest qubit count entering the scaling fit.
    #[serde(default)]
    pub fit_start_m: Option<usize>,

    #[serde(default)]
    pub regime: Option<Regime>,
    #[serde(default)]
    pub p: Option<usize>,
    #[serde(default)]
    pub shots: Option<usize>,
    #[serde(default)]
    pub max_iterations: Option<usize>,
    #[serde(default)]
    pub cvar_alpha: Option<f64>,
    #[serde(default)]
    pub max_bond: Option<usize>,
    #[serde(default)]
    pub threshold: Option<f64>,
    #[serde(default)]
    pub optimizer: Option<OptimizerKind>,
    #[serde(default)]
    pub random_initial_configuration: bool,

    /// Dual-annealing settings for `kind = "sa"`.
    #[serde(default)]
    pub sa: Option<SaConfig>,
    /// Settings for `kind = "sa-discrete"`.
    #[serde(default)]
    pub discrete: Option<DiscreteSaConfig>,
}

/// Fit start used when a method does not set one: 15 qubits for the
/// statevector, 18 otherwise.
pub fn default_fit_start(method: Method) -> usize {
    match method {
        Method::SvQaoa => 15,
        _ => 18,
    }
}

/// What a cell runs, fully resolved. Its JSON form is hashed to key the cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Solver {
    Qaoa(QaoaConfig),
    Anneal(Annealer),
}

impl MethodSpec {
    pub fn label(&self) -> String {
        self.label.clone().unwrap_or_else(|| self.kind.name().to_string())
    }

    pub fn fit_start(&self) -> usize {
        self.fit_start_m.unwrap_or_else(|| default_fit_start(self.kind))
    }

    fn check(&self) -> Result<()> {
        let label = self.label();
        let bad = |m: &str| Err(BenchError::Plan(format!("method {label}: {m}")));
        if self.trajectories == 0 {
            return bad("trajectories must be at least 1");
        }
        let qaoa_only = self.regime.is_some()
            || self.p.is_some()
            || self.shots.is_some()
            || self.cvar_alpha.is_some()
            || self.optimizer.is_some()
            || self.random_initial_configuration;
        match self.kind {
            Method::SvQaoa | Method::MpsQaoa => {
                if self.sa.is_some() || self.discrete.is_some() {
                    return bad("annealer settings on a QAOA method");
                }
                if self.kind == Method::SvQaoa && (self.max_bond.is_some() || self.threshold.is_some()) {
                    return bad("MPS settings on a statevector method");
                }
            }
            Method::Sa | Method::SaDiscrete => {
                if qaoa_only || self.max_bond.is_some() || self.threshold.is_some() || self.max_iterations.is_some() {
                    return bad("QAOA settings on an annealing method");
                }
                if (self.kind == Method::Sa && self.discrete.is_some())
                    || (self.kind == Method::SaDiscrete && self.sa.is_some())
                {
                    return bad("settings for the other annealer");
                }
            }
        }
        Ok(())
    }

    /// Resolved solver for an `M`-qubit instance with ground energy `ground`.
    pub fn solver(&self, plan_seed: u64, num_qubits: usize, ground: f64) -> Solver {
        let seed = self.seed.unwrap_or(plan_seed);
        match self.kind {
            Method::SvQaoa | Method::MpsQaoa => {
                let backend = if self.kind == Method::MpsQaoa {
                    let d = MpsConfig::default();
                    Backend::Mps(MpsConfig {
                        max_bond: self.max_bond.unwrap_or(d.max_bond),
                        threshold: self.threshold.unwrap_or(d.threshold),
                    })
                } else {
                    Backend::Statevector
                };
                let mut cfg = QaoaConfig::new(
                    self.regime.unwrap_or(Regime::Xy),
                    self.p.unwrap_or(4),
                    backend,
                    num_qubits,
                    StopMode::ground_state(ground),
                );
                cfg.shots_per_iteration = self.shots.unwrap_or_else(|| default_shots(num_qubits, &cfg.backend));
                cfg.max_iterations = self.max_iterations.unwrap_or_else(|| default_max_iterations(&cfg.backend));
                if let Some(a) = self.cvar_alpha {
                    cfg.cvar_alpha = a;
                }
                if let Some(o) = self.optimizer {
                    cfg.optimizer = o;
                }
                cfg.random_initial_configuration = self.random_initial_configuration;
                cfg.seed = seed;
                Solver::Qaoa(cfg)
            }
            Method::Sa => Solver::Anneal(Annealer::Dual(SaConfig {
                seed,
                ..self.sa.unwrap_or_default()
            })),
            Method::SaDiscrete => Solver::Anneal(Annealer::Discrete(DiscreteSaConfig {
                seed,
                ..self.discrete.unwrap_or_default()
            })),
        }
    }
}

impl Plan {
    pub fn from_toml(text: &str) -> Result<Self> {
        let plan: Plan = toml::from_str(text)?;
        plan.check()?;
        Ok(plan)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut plan = Self::from_toml(&std::fs::read_to_string(path)?)?;
        let base = path.parent().unwrap_or(Path::new("."));
        for s in &mut plan.sizes {
            if let Some(p) = &s.problem {
                if p.is_relative() {
                    s.problem = Some(base.join(p));
                }
            }
        }
        Ok(plan)
    }

    fn check(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(BenchError::Plan("no methods".into()));
        }
        let mut labels = BTreeSet::new();
        for m in &self.methods {
            m.check()?;
            if !labels.insert(m.label()) {
                return Err(BenchError::Plan(format!("duplicate method label {}", m.label())));
            }
        }
        let sizes = self.sizes();
        if sizes.is_empty() {
            return Err(BenchError::Plan("no problem sizes".into()));
        }
        for s in &sizes {
            if s.residues == 0 || s.rotamers == 0 {
                return Err(BenchError::Plan("sizes must be positive".into()));
            }
        }
        let mut seen = BTreeSet::new();
        for s in &sizes {
            if !seen.insert((s.residues, s.rotamers)) {
                return Err(BenchError::Plan(format!(
                    "size N={} n={} listed twice",
                    s.residues, s.rotamers
                )));
            }
        }
        Ok(())
    }

    /// Grid sizes followed by explicit ones, ordered by `(M, N, n)`.
    pub fn sizes(&self) -> Vec<SizeSpec> {
        let mut out: Vec<SizeSpec> = Vec::new();
        if let Some(g) = &self.grid {
            for &residues in &g.residues {
                for &rotamers in &g.rotamers {
                    if !self.sizes.iter().any(|s| s.residues == residues && s.rotamers == rotamers) {
                        out.push(SizeSpec {
                            residues,
                            rotamers,
                            problem: None,
                            ground_energy: None,
                        });
                    }
                }
            }
        }
        out.extend(self.sizes.iter().cloned());
        out.sort_by_key(|s| (s.residues * s.rotamers, s.residues, s.rotamers));
        out
    }

    /// Generator for a size without a problem file.
    pub fn generator(&self, residues: usize, rotamers: usize) -> InstanceGenerator {
        InstanceGenerator {
            self_range: self.instances.self_range,
            pair_range: self.instances.pair_range,
            long_range_decay: self.instances.long_range_decay,
            ..InstanceGenerator::uniform(residues, rotamers, instance_seed(self.seed, residues, rotamers))
        }
    }
}

/// Instance seed of size `(N, n)` under a plan seed.
pub fn instance_seed(plan_seed: u64, residues: usize, rotamers: usize) -> u64 {
    rotaq_core::rng::derive_seed(plan_seed, ((residues as u64) << 32) | rotamers as u64)
}
