use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::ansatz::{hea_circuit, hea_parameter_count, qaoa_circuit};
use super::graph::Graph;
use super::hamiltonian::{brute_force_maxcut, heisenberg_hamiltonian_with, maxcut_hamiltonian, Boundary};
use super::local::multistart_minimize;
use crate::error::{Error, Result};
use crate::sim::{Circuit, NoisySimulator, PauliHamiltonian};

const BOUNDS_SLACK: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ProblemKind {
    /// θ = (γ_1..γ_p, β_1..β_p).
    QaoaMaxCut { graph: Graph, depth: usize, max_cut: usize },
    /// Only the last rotation layer is free; the earlier layers are frozen at
    /// `fixed_prefix`.
    HeaVqe {
        n_spins: usize,
        coupling: f64,
        field: f64,
        layers: usize,
        boundary: Boundary,
        fixed_prefix: Vec<f64>,
        /// Noiseless optimum of the full ansatz (prefix followed by the free
        /// layer).
        reference_theta: Vec<f64>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeaVqeSpec {
    pub n_spins: usize,
    pub coupling: f64,
    pub field: f64,
    pub layers: usize,
    pub boundary: Boundary,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for HeaVqeSpec {
    fn default() -> Self {
        HeaVqeSpec {
            n_spins: 4,
            coupling: 1.0,
            field: 0.2,
            layers: 2,
            boundary: Boundary::Open,
            restarts: 20,
            seed: 0,
        }
    }
}

/// A variational problem: ansatz, observable, parameter box and sign
/// convention. All objectives are minimized; MaxCut uses `f = −Tr[ρ H_C]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VqaProblem {
    kind: ProblemKind,
    hamiltonian: PauliHamiltonian,
    bounds: Vec<(f64, f64)>,
    #[serde(skip)]
    simulator: NoisySimulator,
}

impl VqaProblem {
    pub fn qaoa_maxcut(graph: Graph, depth: usize) -> Result<Self> {
        let max_cut = brute_force_maxcut(&graph)?;
        let hamiltonian = maxcut_hamiltonian(&graph);
        let bounds = std::iter::repeat((0.0, PI))
            .take(depth)
            .chain(std::iter::repeat((0.0, PI / 2.0)).take(depth))
            .collect();
        Ok(VqaProblem {
            kind: ProblemKind::QaoaMaxCut { graph, depth, max_cut },
            hamiltonian,
            bounds,
            simulator: NoisySimulator::default(),
        })
    }

    /// Builds the masked VQE problem, finding the frozen prefix with a
    /// multi-start noiseless optimization of the whole ansatz.
    pub fn hea_vqe(spec: &HeaVqeSpec) -> Result<Self> {
        let h = heisenberg_hamiltonian_with(spec.n_spins, spec.coupling, spec.field, spec.boundary)?;
        let simulator = NoisySimulator::default();
        let n = spec.n_spins;
        let energy = |theta: &[f64]| -> Result<f64> {
            simulator.run(&hea_circuit(n, spec.layers, theta)?, 0.0)?.expectation(&h)
        };
        let dim = hea_parameter_count(n, spec.layers);
        let (reference, _) = multistart_minimize(&energy, dim, spec.restarts, 300, spec.seed)?;
        Self::hea_vqe_with_reference(spec, reference)
    }

    /// Masked VQE problem around a known full parameter vector.
    pub fn hea_vqe_with_reference(spec: &HeaVqeSpec, reference_theta: Vec<f64>) -> Result<Self> {
        let n = spec.n_spins;
        if spec.layers == 0 {
            return Err(Error::domain("hardware-efficient ansatz needs at least one layer"));
        }
        if reference_theta.len() != hea_parameter_count(n, spec.layers) {
            return Err(Error::domain(format!(
                "reference parameters have length {}, expected {}",
                reference_theta.len(),
                hea_parameter_count(n, spec.layers)
            )));
        }
        let hamiltonian = heisenberg_hamiltonian_with(n, spec.coupling, spec.field, spec.boundary)?;
        let fixed_prefix = reference_theta[..n * (spec.layers - 1)].to_vec();
        Ok(VqaProblem {
            kind: ProblemKind::HeaVqe {
                n_spins: n,
                coupling: spec.coupling,
                field: spec.field,
                layers: spec.layers,
                boundary: spec.boundary,
                fixed_prefix,
                reference_theta,
            },
            hamiltonian,
            bounds: vec![(-PI, PI); n],
            simulator: NoisySimulator::default(),
        })
    }

    pub fn with_simulator(mut self, simulator: NoisySimulator) -> Self {
        self.simulator = simulator;
        self
    }

    pub fn kind(&self) -> &ProblemKind {
        &self.kind
    }

    pub fn hamiltonian(&self) -> &PauliHamiltonian {
        &self.hamiltonian
    }

    pub fn theta_dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn n_qubits(&self) -> usize {
        self.hamiltonian.n_qubits()
    }

    pub fn is_maxcut(&self) -> bool {
        matches!(self.kind, ProblemKind::QaoaMaxCut { .. })
    }

    pub fn max_cut(&self) -> Option<usize> {
        match self.kind {
            ProblemKind::QaoaMaxCut { max_cut, .. } => Some(max_cut),
            ProblemKind::HeaVqe { .. } => None,
        }
    }

    /// Free-parameter part of the noiseless optimum, for masked VQE problems.
    pub fn noiseless_reference(&self) -> Option<Vec<f64>> {
        match &self.kind {
            ProblemKind::HeaVqe {
                reference_theta,
                fixed_prefix,
                ..
            } => Some(reference_theta[fixed_prefix.len()..].to_vec()),
            ProblemKind::QaoaMaxCut { .. } => None,
        }
    }

    fn check_theta(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.theta_dim() {
            return Err(Error::domain(format!(
                "expected {} parameters, got {}",
                self.theta_dim(),
                theta.len()
            )));
        }
        for (k, (&t, &(lo, hi))) in theta.iter().zip(&self.bounds).enumerate() {
            if !(t >= lo - BOUNDS_SLACK && t <= hi + BOUNDS_SLACK) {
                return Err(Error::domain(format!(
                    "parameter {k} = {t} outside [{lo}, {hi}]"
                )));
            }
        }
        Ok(())
    }

    pub fn circuit(&self, theta: &[f64]) -> Result<Circuit> {
        self.check_theta(theta)?;
        match &self.kind {
            ProblemKind::QaoaMaxCut { graph, depth, .. } => {
                qaoa_circuit(graph, &theta[..*depth], &theta[*depth..])
            }
            ProblemKind::HeaVqe {
                n_spins,
                layers,
                fixed_prefix,
                ..
            } => {
                let full: Vec<f64> = fixed_prefix.iter().chain(theta).copied().collect();
                hea_circuit(*n_spins, *layers, &full)
            }
        }
    }

    /// `Tr[ρ(θ, ξ) H]` without any sign convention applied.
    pub fn energy(&self, theta: &[f64], xi: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&xi) {
            return Err(Error::domain(format!("noise level {xi} outside [0, 1]")));
        }
        let rho = self.simulator.run(&self.circuit(theta)?, xi)?;
        rho.expectation(&self.hamiltonian)
    }

    /// The minimized objective `f(θ, ξ)`.
    pub fn evaluate(&self, theta: &[f64], xi: f64) -> Result<f64> {
        let e = self.energy(theta, xi)?;
        Ok(if self.is_maxcut() { -e } else { e })
    }

    /// Expected cut divided by the exact maximum cut.
    pub fn approximation_ratio(&self, theta: &[f64], xi: f64) -> Result<f64> {
        match self.max_cut() {
            None => Err(Error::domain("approximation ratio is defined for MaxCut problems only")),
            Some(0) => Err(Error::domain("graph has no edges; approximation ratio undefined")),
            Some(best) => Ok(self.energy(theta, xi)? / best as f64),
        }
    }

    /// Problem metric used for reporting: approximation ratio for MaxCut, raw
    /// energy otherwise.
    pub fn metric(&self, theta: &[f64], xi: f64) -> Result<f64> {
        if self.is_maxcut() {
            self.approximation_ratio(theta, xi)
        } else {
            self.energy(theta, xi)
        }
    }
}

pub fn evaluate_objective(problem: &VqaProblem, theta: &[f64], xi: f64) -> Result<f64> {
    problem.evaluate(theta, xi)
}

pub fn approximation_ratio(problem: &VqaProblem, theta: &[f64], xi: f64) -> Result<f64> {
    problem.approximation_ratio(theta, xi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qaoa_zero_angles() {
        let k3 = Graph::complete(3).unwrap();
        let p = VqaProblem::qaoa_maxcut(k3, 1).unwrap();
        assert!((p.evaluate(&[0.0, 0.0], 0.0).unwrap() + 1.5).abs() < 1e-12);
        assert!((p.approximation_ratio(&[0.0, 0.0], 0.0).unwrap() - 0.75).abs() < 1e-12);
        assert!(p.approximation_ratio(&[1.0, 0.3], 1.0).unwrap().abs() < 1e-12);
    }

    #[test]
    fn out_of_bounds_and_bad_noise() {
        let p = VqaProblem::qaoa_maxcut(Graph::cycle(4).unwrap(), 1).unwrap();
        assert!(p.evaluate(&[4.0, 0.1], 0.0).is_err());
        assert!(p.evaluate(&[1.0, 0.1, 0.2], 0.0).is_err());
        assert!(p.evaluate(&[1.0, 0.1], -0.01).is_err());
        let empty = VqaProblem::qaoa_maxcut(Graph::new(3, []).unwrap(), 1).unwrap();
        assert!(empty.approximation_ratio(&[0.0, 0.0], 0.0).is_err());
    }

    #[test]
    fn fully_damped_vqe_matches_ground_product_state() {
        let spec = HeaVqeSpec {
            n_spins: 3,
            ..HeaVqeSpec::default()
        };
        let p = VqaProblem::hea_vqe_with_reference(&spec, vec![0.3; 6]).unwrap();
        // |000>: two ZZ bonds give +2, field gives 3·0.2.
        let f = p.evaluate(&[0.1, -0.7, 2.0], 1.0).unwrap();
        assert!((f - 2.6).abs() < 1e-12);
        assert_eq!(p.noiseless_reference().unwrap(), vec![0.3; 3]);
    }
}
