use super::graph::Graph;
use crate::error::{Error, Result};
use crate::sim::{Circuit, Gate};

/// Depth-`p` QAOA circuit for MaxCut.
///
/// Prepares `|+>^n`, then per layer applies `exp(-iγ H_C)` edge by edge as
/// `RZZ(-γ)` (the identity part of each edge term only contributes a global
/// phase) followed by the mixer `exp(-iβ X)` as `RX(2β)` on every qubit.
pub fn qaoa_circuit(graph: &Graph, gammas: &[f64], betas: &[f64]) -> Result<Circuit> {
    if gammas.len() != betas.len() {
        return Err(Error::domain(format!(
            "{} gammas but {} betas",
            gammas.len(),
            betas.len()
        )));
    }
    let n = graph.n_vertices();
    let mut circuit = Circuit::new(n);
    for q in 0..n {
        circuit.push(Gate::h(q))?;
    }
    for (&gamma, &beta) in gammas.iter().zip(betas) {
        for &(i, j) in graph.edges() {
            circuit.push(Gate::rzz(i, j, -gamma))?;
        }
        for q in 0..n {
            circuit.push(Gate::rx(q, 2.0 * beta))?;
        }
    }
    Ok(circuit)
}

pub fn hea_parameter_count(n: usize, layers: usize) -> usize {
    n * layers
}

/// Hardware-efficient ansatz: an `RY` layer, then `layers - 1` repetitions of
/// a linear CNOT chain followed by another `RY` layer. `theta` is laid out
/// layer by layer, qubit 0 first.
pub fn hea_circuit(n: usize, layers: usize, theta: &[f64]) -> Result<Circuit> {
    if layers == 0 {
        return Err(Error::domain("hardware-efficient ansatz needs at least one layer"));
    }
    let expected = hea_parameter_count(n, layers);
    if theta.len() != expected {
        return Err(Error::domain(format!(
            "ansatz with {n} qubits and {layers} layers takes {expected} parameters, got {}",
            theta.len()
        )));
    }
    let mut circuit = Circuit::new(n);
    for (layer, angles) in theta.chunks_exact(n).enumerate() {
        if layer > 0 {
            for q in 0..n - 1 {
                circuit.push(Gate::cnot(q, q + 1))?;
            }
        }
        for (q, &a) in angles.iter().enumerate() {
            circuit.push(Gate::ry(q, a))?;
        }
    }
    Ok(circuit)
}
