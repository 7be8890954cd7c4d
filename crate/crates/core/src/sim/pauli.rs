use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliTerm {
    pub coefficient: f64,
    /// One symbol per qubit, qubit 0 first.
    pub paulis: Vec<Pauli>,
}

/// Bit masks describing the action `P|m> = i^{n_y} (-1)^{|m & z|} |m ^ x>`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct TermMasks {
    pub x: usize,
    pub z: usize,
    pub i_power: u32,
}

impl PauliTerm {
    pub(crate) fn masks(&self) -> TermMasks {
        let n = self.paulis.len();
        let mut masks = TermMasks {
            x: 0,
            z: 0,
            i_power: 0,
        };
        for (q, p) in self.paulis.iter().enumerate() {
            let bit = 1usize << (n - 1 - q);
            match p {
                Pauli::I => {}
                Pauli::X => masks.x |= bit,
                Pauli::Z => masks.z |= bit,
                Pauli::Y => {
                    masks.x |= bit;
                    masks.z |= bit;
                    masks.i_power += 1;
                }
            }
        }
        masks
    }
}

impl TermMasks {
    /// Phase picked up by basis state `m`.
    #[inline]
    pub fn phase(&self, m: usize) -> Complex64 {
        let sign = if (m & self.z).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        match self.i_power % 4 {
            0 => Complex64::new(sign, 0.0),
            1 => Complex64::new(0.0, sign),
            2 => Complex64::new(-sign, 0.0),
            _ => Complex64::new(0.0, -sign),
        }
    }
}

/// A real-weighted sum of Pauli strings on a fixed register.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliHamiltonian {
    n_qubits: usize,
    terms: Vec<PauliTerm>,
}

impl PauliHamiltonian {
    pub fn new(n_qubits: usize) -> Self {
        PauliHamiltonian {
            n_qubits,
            terms: Vec::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn add_term(&mut self, coefficient: f64, paulis: Vec<Pauli>) -> Result<&mut Self> {
        if paulis.len() != self.n_qubits {
            return Err(Error::domain(format!(
                "Pauli string of length {} on a {}-qubit Hamiltonian",
                paulis.len(),
                self.n_qubits
            )));
        }
        if !coefficient.is_finite() {
            return Err(Error::domain(format!("non-finite coefficient {coefficient}")));
        }
        self.terms.push(PauliTerm { coefficient, paulis });
        Ok(self)
    }

    /// Adds `coefficient * P_{q0} P_{q1} ...` with identities elsewhere.
    pub fn add_sparse(&mut self, coefficient: f64, ops: &[(usize, Pauli)]) -> Result<&mut Self> {
        let mut paulis = vec![Pauli::I; self.n_qubits];
        for &(q, p) in ops {
            if q >= self.n_qubits {
                return Err(Error::domain(format!(
                    "qubit {q} out of range for {} qubit(s)",
                    self.n_qubits
                )));
            }
            paulis[q] = p;
        }
        self.add_term(coefficient, paulis)
    }

    /// Parses a label such as `"ZZI"` (qubit 0 first).
    pub fn add_label(&mut self, coefficient: f64, label: &str) -> Result<&mut Self> {
        let paulis = label
            .chars()
            .map(|ch| match ch {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(Error::domain(format!("unknown Pauli symbol {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        self.add_term(coefficient, paulis)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        PauliHamiltonian {
            n_qubits: self.n_qubits,
            terms: self
                .terms
                .iter()
                .map(|t| PauliTerm {
                    coefficient: factor * t.coefficient,
                    paulis: t.paulis.clone(),
                })
                .collect(),
        }
    }

    /// True when every term has an even number of `Y`s, so the matrix is real.
    pub fn is_real(&self) -> bool {
        self.terms
            .iter()
            .all(|t| t.paulis.iter().filter(|&&p| p == Pauli::Y).count() % 2 == 0)
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let dim = 1usize << self.n_qubits;
        let mut h = DMatrix::<Complex64>::zeros(dim, dim);
        for term in &self.terms {
            let masks = term.masks();
            for m in 0..dim {
                h[(m ^ masks.x, m)] += masks.phase(m) * term.coefficient;
            }
        }
        h
    }

    /// `<ψ|H|ψ>` for a normalized state vector.
    pub fn expectation_pure(&self, psi: &DVector<Complex64>) -> f64 {
        let mut acc = 0.0;
        for term in &self.terms {
            let masks = term.masks();
            let mut z = Complex64::new(0.0, 0.0);
            for (m, amp) in psi.iter().enumerate() {
                z += psi[m ^ masks.x].conj() * masks.phase(m) * amp;
            }
            acc += term.coefficient * z.re;
        }
        acc
    }
}

impl fmt::Display for PauliHamiltonian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            let label: String = t.paulis.iter().map(|p| p.symbol()).collect();
            write!(f, "{}*{}", t.coefficient, label)?;
        }
        Ok(())
    }
}
