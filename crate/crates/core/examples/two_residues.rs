//! Solve the two-residue example three ways: exhaustive search, dual
//! annealing and statevector XY-QAOA.
//!
//! cargo run -p rotaq-core --example two_residues

use std::path::Path;

use rotaq_core::baselines::{brute_force, dual_anneal, GroundTarget, SaConfig};
use rotaq_core::circuit::Regime;
use rotaq_core::energy::{build_qubo, qubo_to_ising, Penalty, RotamerProblem};
use rotaq_core::qaoa::{QaoaConfig, QaoaRunner, StopMode};
use rotaq_core::sim::Backend;

fn main() -> rotaq_core::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data");
    let problem = RotamerProblem::load(dir.join("two_residues.json"), true)?;
    assert_eq!(problem, RotamerProblem::load(dir.join("two_residues.csv"), true)?);

    let qubo = build_qubo(&problem, Some(Penalty::default_for(&problem)))?;
    let ising = qubo_to_ising(&qubo)?;
    println!("M = {} qubits, penalty {:?}", problem.dimension(), qubo.penalty());
    println!("Ising fields {:?}, constant {}", ising.fields(), ising.constant());

    let oracle = brute_force(&problem)?;
    let ground = oracle.ground_energy;
    println!("ground energy {ground} at {:?}", oracle.ground_configs);

    let sa = dual_anneal(&problem, &SaConfig::default(), None, Some(GroundTarget::new(ground)), 0)?;
    println!("dual annealing: converged {} after {} evaluations", sa.converged, sa.cost);

    let cfg = QaoaConfig::new(
        Regime::Xy,
        2,
        Backend::Statevector,
        problem.dimension(),
        StopMode::ground_state(ground),
    );
    let run = QaoaRunner::new(&problem, cfg)?.run(0)?;
    println!(
        "xy-QAOA: converged {} at iteration {:?}, bitstring {}, {} circuits",
        run.converged,
        run.first_hit.map(|h| h.iteration),
        run.best_bitstring.map(|b| b.to_string()).unwrap_or_default(),
        run.cost
    );
    Ok(())
}
