//! Problem definitions: MaxCut graphs and QAOA, the Heisenberg chain and the
//! hardware-efficient ansatz, plus exact classical reference solutions.

mod ansatz;
mod graph;
mod hamiltonian;
mod local;
mod problem;

pub use ansatz::{hea_circuit, hea_parameter_count, qaoa_circuit};
pub use graph::Graph;
pub use hamiltonian::{
    brute_force_maxcut, exact_ground_energy, heisenberg_convention_audit, heisenberg_hamiltonian,
    heisenberg_hamiltonian_with, maxcut_hamiltonian, Boundary, ConventionEnergy,
    MAX_BRUTE_FORCE_VERTICES, MAX_EXACT_QUBITS,
};
pub use local::multistart_minimize;
pub use problem::{approximation_ratio, evaluate_objective, HeaVqeSpec, ProblemKind, VqaProblem};
