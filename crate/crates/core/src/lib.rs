//! Rotamer (side-chain) packing as a QUBO/Ising problem, solved with a
//! simulated QAOA under three constraint regimes and compared against
//! exhaustive search and generalized simulated annealing.
//!
//! The crate is organised bottom-up:
//!
//! * [`energy`] – rotamer energy tables, the QUBO matrix, the Ising mapping
//!   and bitstring decoding.
//! * [`circuit`] – gate-level circuits, QAOA ansatz assembly and the
//!   logical-depth analyzer.
//! * [`sim`] – dense statevector and matrix-product-state simulators behind
//!   one sampling contract.
//! * [`qaoa`] – CVaR objective, gradient-free optimizers and the hybrid loop.
//! * [`baselines`] – brute-force oracle and annealing heuristics.
//!
//! Qubit `k` is bit `k` of a basis-state index (qubit 0 is least
//! significant), and qubits are laid out residue block by residue block.

pub mod baselines;
pub mod circuit;
pub mod energy;
mod error;
pub mod qaoa;
pub mod record;
pub mod rng;
pub mod sim;

pub use error::{Error, Result};
