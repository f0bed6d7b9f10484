//! Classical references: exhaustive search and annealing heuristics.

mod brute_force;
mod discrete;
mod dual_annealing;
mod sa;

pub use brute_force::{brute_force, brute_force_capped, OracleResult, DEFAULT_ENUMERATION_CAP};
pub use discrete::{discrete_anneal, DiscreteSaConfig};
pub use dual_annealing::{generalized_annealing, AnnealObjective, AnnealResult, SaConfig};
pub use sa::{dual_anneal, sa_ensemble, Annealer, GroundTarget, SaEnsemble};
