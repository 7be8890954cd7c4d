use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    H,
    RX,
    RY,
    RZ,
    CNOT,
    CZ,
    RZZ,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::H | GateKind::RX | GateKind::RY | GateKind::RZ => 1,
            GateKind::CNOT | GateKind::CZ | GateKind::RZZ => 2,
        }
    }

    pub fn is_rotation(self) -> bool {
        matches!(
            self,
            GateKind::RX | GateKind::RY | GateKind::RZ | GateKind::RZZ
        )
    }
}

/// A gate on one or two qubits.
///
/// Rotation angles follow the usual convention `R_P(a) = exp(-i a P / 2)`,
/// including `RZZ(a) = exp(-i a Z⊗Z / 2)`. For `CNOT` the first target is
/// the control.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub targets: Vec<usize>,
    pub angle: Option<f64>,
}

/// Unitary of a gate in its local basis; two-qubit gates order the basis as
/// `|t0 t1>` with the first target as the high bit.
pub(crate) enum LocalUnitary {
    Diagonal1([Complex64; 2]),
    Dense1([[Complex64; 2]; 2]),
    Diagonal2([Complex64; 4]),
    Dense2([[Complex64; 4]; 4]),
}

impl Gate {
    fn single(kind: GateKind, q: usize, angle: Option<f64>) -> Self {
        Gate {
            kind,
            targets: vec![q],
            angle,
        }
    }

    fn pair(kind: GateKind, a: usize, b: usize, angle: Option<f64>) -> Self {
        Gate {
            kind,
            targets: vec![a, b],
            angle,
        }
    }

    pub fn h(q: usize) -> Self {
        Self::single(GateKind::H, q, None)
    }

    pub fn rx(q: usize, angle: f64) -> Self {
        Self::single(GateKind::RX, q, Some(angle))
    }

    pub fn ry(q: usize, angle: f64) -> Self {
        Self::single(GateKind::RY, q, Some(angle))
    }

    pub fn rz(q: usize, angle: f64) -> Self {
        Self::single(GateKind::RZ, q, Some(angle))
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Self::pair(GateKind::CNOT, control, target, None)
    }

    pub fn cz(a: usize, b: usize) -> Self {
        Self::pair(GateKind::CZ, a, b, None)
    }

    pub fn rzz(a: usize, b: usize, angle: f64) -> Self {
        Self::pair(GateKind::RZZ, a, b, Some(angle))
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        if self.targets.len() != self.kind.arity() {
            return Err(Error::domain(format!(
                "{:?} expects {} target(s), got {}",
                self.kind,
                self.kind.arity(),
                self.targets.len()
            )));
        }
        if let Some(&q) = self.targets.iter().find(|&&q| q >= n_qubits) {
            return Err(Error::domain(format!(
                "qubit index {q} out of range for {n_qubits} qubit(s)"
            )));
        }
        if self.targets.len() == 2 && self.targets[0] == self.targets[1] {
            return Err(Error::domain(format!(
                "{:?} targets must be distinct, got {:?}",
                self.kind, self.targets
            )));
        }
        match (self.kind.is_rotation(), self.angle) {
            (true, Some(a)) if a.is_finite() => Ok(()),
            (true, Some(a)) => Err(Error::domain(format!("non-finite angle {a}"))),
            (true, None) => Err(Error::domain(format!("{:?} requires an angle", self.kind))),
            (false, Some(_)) => Err(Error::domain(format!(
                "{:?} does not take an angle",
                self.kind
            ))),
            (false, None) => Ok(()),
        }
    }

    pub(crate) fn local_unitary(&self) -> LocalUnitary {
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let half = self.angle.unwrap_or(0.0) / 2.0;
        let (c, s) = (half.cos(), half.sin());
        match self.kind {
            GateKind::H => {
                let r = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                LocalUnitary::Dense1([[r, r], [r, -r]])
            }
            GateKind::RX => {
                let d = Complex64::new(c, 0.0);
                let o = Complex64::new(0.0, -s);
                LocalUnitary::Dense1([[d, o], [o, d]])
            }
            GateKind::RY => {
                let d = Complex64::new(c, 0.0);
                LocalUnitary::Dense1([[d, Complex64::new(-s, 0.0)], [Complex64::new(s, 0.0), d]])
            }
            GateKind::RZ => LocalUnitary::Diagonal1([Complex64::new(c, -s), Complex64::new(c, s)]),
            GateKind::CNOT => LocalUnitary::Dense2([
                [one, zero, zero, zero],
                [zero, one, zero, zero],
                [zero, zero, zero, one],
                [zero, zero, one, zero],
            ]),
            GateKind::CZ => LocalUnitary::Diagonal2([one, one, one, -one]),
            GateKind::RZZ => {
                let even = Complex64::new(c, -s);
                let odd = Complex64::new(c, s);
                LocalUnitary::Diagonal2([even, odd, odd, even])
            }
        }
    }
}

/// An ordered gate list on a fixed register.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub n_qubits: usize,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Circuit {
            n_qubits,
            gates: Vec::new(),
        }
    }

    pub fn push(&mut self, gate: Gate) -> Result<&mut Self> {
        gate.validate(self.n_qubits)?;
        self.gates.push(gate);
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        self.gates.iter().try_for_each(|g| g.validate(self.n_qubits))
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_targets_and_angles() {
        assert!(Gate::h(3).validate(3).is_err());
        assert!(Gate::cnot(1, 1).validate(3).is_err());
        assert!(Gate::rx(0, f64::NAN).validate(1).is_err());
        assert!(Gate::rzz(0, 1, f64::INFINITY).validate(2).is_err());
        let bogus = Gate {
            kind: GateKind::H,
            targets: vec![0],
            angle: Some(1.0),
        };
        assert!(bogus.validate(1).is_err());
        assert!(Gate::cz(0, 2).validate(3).is_ok());
    }

    #[test]
    fn circuit_push_validates() {
        let mut c = Circuit::new(2);
        assert!(c.push(Gate::h(0)).is_ok());
        assert!(c.push(Gate::cnot(0, 2)).is_err());
        assert_eq!(c.len(), 1);
    }
}
