//! Rotamer energy tables, the QUBO matrix and its Ising form.

mod bitstring;
mod generator;
mod ising;
mod layout;
mod problem;
mod profile;
mod qubo;

pub use bitstring::{Bitstring, MAX_BITS};
pub use generator::{InstanceGenerator, RotamerCounts};
pub use ising::{qubo_to_ising, IsingHamiltonian};
pub use layout::{BlockLayout, BlockViolation, Decoded};
pub use problem::{
    FrozenProblem, PairEnergy, PairTable, ProblemFile, RotamerProblem, SelfEnergy,
    SYMMETRY_TOLERANCE,
};
pub use profile::{interaction_profile, long_range_ratio, DistanceProfile};
pub use qubo::{build_qubo, Penalty, PenaltyForm, QuboMatrix};
