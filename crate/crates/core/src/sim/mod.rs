//! Exact density-matrix simulation of parameterized circuits under per-gate
//! amplitude/phase damping.
//!
//! Every gate is followed by the combined damping channel with
//! `p_ad = p_pd = p` on each qubit the gate touched. Idle qubits do not
//! accumulate noise.

mod channel;
mod density;
mod gate;
mod pauli;

pub use channel::{damping_channel, KrausChannel, COMPLETENESS_TOL};
pub use density::{apply_channel, apply_gate, expectation, DensityMatrix};
pub use gate::{Circuit, Gate, GateKind};
pub use pauli::{Pauli, PauliHamiltonian, PauliTerm};

use crate::error::{Error, Result};

pub const DEFAULT_MAX_QUBITS: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NoisySimulator {
    pub max_qubits: usize,
}

impl Default for NoisySimulator {
    fn default() -> Self {
        NoisySimulator {
            max_qubits: DEFAULT_MAX_QUBITS,
        }
    }
}

impl NoisySimulator {
    pub fn with_max_qubits(max_qubits: usize) -> Self {
        NoisySimulator { max_qubits }
    }

    /// Evolves `|0…0><0…0|` through `circuit` at noise level `p`.
    pub fn run(&self, circuit: &Circuit, p: f64) -> Result<DensityMatrix> {
        if circuit.n_qubits > self.max_qubits {
            return Err(Error::Resource(format!(
                "{} qubits exceeds the simulator cap of {}",
                circuit.n_qubits, self.max_qubits
            )));
        }
        let channel = damping_channel(p, p)?;
        circuit.validate()?;
        let mut rho = DensityMatrix::ground(circuit.n_qubits);
        for gate in &circuit.gates {
            rho.apply_gate_in_place(gate)?;
            if p > 0.0 {
                for &q in &gate.targets {
                    rho.apply_channel_in_place(&channel, q)?;
                }
            }
        }
        Ok(rho)
    }
}

/// [`NoisySimulator::run`] with the default qubit cap.
pub fn run_noisy_circuit(circuit: &Circuit, p: f64) -> Result<DensityMatrix> {
    NoisySimulator::default().run(circuit, p)
}
