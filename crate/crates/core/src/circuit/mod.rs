//! Gate-level circuits, QAOA ansatz assembly and depth analysis.

mod ansatz;
mod depth;
mod export;
mod gate;
mod ir;

pub use ansatz::{
    assemble_ansatz, assemble_layers, build_cost_unitary, build_initial_state, build_mixer,
    cost_hamiltonian, random_configuration, ring_edge_colors, AnsatzSpec, Regime,
};
pub use depth::{
    depth_for_dimensions, depth_table, logical_depth, schedule_segment, DepthAnalysis,
    DepthReport, ScheduledLayer, SegmentSchedule,
};
pub use export::{line_routing_estimate, parse_gate_list, to_gate_list, LineRoutingEstimate};
pub use gate::{a_gate_matrix, Gate, GateKind, GateMatrix};
pub use ir::{Circuit, Segment, SegmentKind};
