use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::channel::KrausChannel;
use super::gate::{Gate, LocalUnitary};
use super::pauli::PauliHamiltonian;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Dense `2^n × 2^n` density operator, stored row-major.
///
/// Qubit 0 is the most significant bit of a basis index, so `|10>` has qubit 0
/// excited.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    dim: usize,
    data: Vec<Complex64>,
}

impl DensityMatrix {
    /// `|0…0><0…0|`.
    pub fn ground(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        let mut data = vec![ZERO; dim * dim];
        data[0] = Complex64::new(1.0, 0.0);
        DensityMatrix {
            n_qubits,
            dim,
            data,
        }
    }

    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        let mut data = vec![ZERO; dim * dim];
        let w = 1.0 / dim as f64;
        for i in 0..dim {
            data[i * dim + i] = Complex64::new(w, 0.0);
        }
        DensityMatrix {
            n_qubits,
            dim,
            data,
        }
    }

    /// `|ψ><ψ|` for a normalized amplitude vector of length `2^n`.
    pub fn from_pure(amplitudes: &[Complex64]) -> Result<Self> {
        let dim = amplitudes.len();
        if dim == 0 || !dim.is_power_of_two() {
            return Err(Error::domain(format!("state length {dim} is not a power of two")));
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::domain(format!("state is not normalized (norm² = {norm})")));
        }
        let mut data = vec![ZERO; dim * dim];
        for (r, a) in amplitudes.iter().enumerate() {
            for (c, b) in amplitudes.iter().enumerate() {
                data[r * dim + c] = a * b.conj();
            }
        }
        Ok(DensityMatrix {
            n_qubits: dim.trailing_zeros() as usize,
            dim,
            data,
        })
    }

    /// Wraps an arbitrary matrix after checking the density-matrix invariants.
    pub fn from_matrix(m: &DMatrix<Complex64>) -> Result<Self> {
        let dim = m.nrows();
        if dim != m.ncols() || dim == 0 || !dim.is_power_of_two() {
            return Err(Error::domain(format!(
                "{}×{} is not a valid density-matrix shape",
                m.nrows(),
                m.ncols()
            )));
        }
        let mut data = vec![ZERO; dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                data[r * dim + c] = m[(r, c)];
            }
        }
        let rho = DensityMatrix {
            n_qubits: dim.trailing_zeros() as usize,
            dim,
            data,
        };
        rho.check_invariants()?;
        Ok(rho)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    pub fn to_matrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.data)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Largest `|ρ_rc − conj(ρ_cr)|`.
    pub fn hermiticity_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..self.dim {
            for c in r..self.dim {
                worst = worst.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        worst
    }

    /// Smallest eigenvalue of the Hermitian part `(ρ + ρ†)/2`.
    pub fn min_eigenvalue(&self) -> f64 {
        let m = self.to_matrix();
        let herm = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        SymmetricEigen::new(herm)
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn check_invariants(&self) -> Result<()> {
        let tr = self.trace();
        if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
            return Err(Error::Internal(format!("trace {tr} differs from 1")));
        }
        let herm = self.hermiticity_error();
        if herm > 1e-10 {
            return Err(Error::Internal(format!("not Hermitian (deviation {herm:e})")));
        }
        let min_eig = self.min_eigenvalue();
        if min_eig < -1e-9 {
            return Err(Error::Internal(format!(
                "not positive semidefinite (min eigenvalue {min_eig:e})"
            )));
        }
        Ok(())
    }

    fn bit(&self, qubit: usize) -> usize {
        1usize << (self.n_qubits - 1 - qubit)
    }

    /// `ρ → UρU†` in place.
    pub fn apply_gate_in_place(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.n_qubits)?;
        match gate.local_unitary() {
            LocalUnitary::Dense1(u) => self.conjugate_single(self.bit(gate.targets[0]), &u),
            LocalUnitary::Diagonal1(d) => {
                let m = self.bit(gate.targets[0]);
                self.conjugate_diagonal(|i| if i & m == 0 { d[0] } else { d[1] });
            }
            LocalUnitary::Dense2(u) => {
                let (ma, mb) = (self.bit(gate.targets[0]), self.bit(gate.targets[1]));
                self.conjugate_pair(ma, mb, &u);
            }
            LocalUnitary::Diagonal2(d) => {
                let (ma, mb) = (self.bit(gate.targets[0]), self.bit(gate.targets[1]));
                self.conjugate_diagonal(|i| {
                    let hi = usize::from(i & ma != 0);
                    let lo = usize::from(i & mb != 0);
                    d[2 * hi + lo]
                });
            }
        }
        Ok(())
    }

    pub fn apply_gate(&self, gate: &Gate) -> Result<Self> {
        let mut out = self.clone();
        out.apply_gate_in_place(gate)?;
        Ok(out)
    }

    /// `ρ → Σ_k E_k ρ E_k†` with the channel acting on `qubit`, in place.
    pub fn apply_channel_in_place(&mut self, channel: &KrausChannel, qubit: usize) -> Result<()> {
        if qubit >= self.n_qubits {
            return Err(Error::domain(format!(
                "qubit {qubit} out of range for {} qubit(s)",
                self.n_qubits
            )));
        }
        self.apply_superoperator(self.bit(qubit), &channel.superoperator());
        Ok(())
    }

    pub fn apply_channel(&self, channel: &KrausChannel, qubit: usize) -> Result<Self> {
        let mut out = self.clone();
        out.apply_channel_in_place(channel, qubit)?;
        Ok(out)
    }

    fn conjugate_diagonal(&mut self, phase: impl Fn(usize) -> Complex64) {
        let dim = self.dim;
        let phases: Vec<Complex64> = (0..dim).map(phase).collect();
        for (r, row) in self.data.chunks_exact_mut(dim).enumerate() {
            let pr = phases[r];
            for (x, pc) in row.iter_mut().zip(&phases) {
                *x *= pr * pc.conj();
            }
        }
    }

    fn conjugate_single(&mut self, m: usize, u: &[[Complex64; 2]; 2]) {
        let dim = self.dim;
        // Left: rows r and r|m mix.
        for r in (0..dim).filter(|r| r & m == 0) {
            let (head, tail) = self.data.split_at_mut((r | m) * dim);
            let row0 = &mut head[r * dim..(r + 1) * dim];
            let row1 = &mut tail[..dim];
            for (x0, x1) in row0.iter_mut().zip(row1.iter_mut()) {
                let (a, b) = (*x0, *x1);
                *x0 = u[0][0] * a + u[0][1] * b;
                *x1 = u[1][0] * a + u[1][1] * b;
            }
        }
        // Right by U†: columns c and c|m mix within each row.
        let uc = [
            [u[0][0].conj(), u[0][1].conj()],
            [u[1][0].conj(), u[1][1].conj()],
        ];
        for row in self.data.chunks_exact_mut(dim) {
            for c in (0..dim).filter(|c| c & m == 0) {
                let (a, b) = (row[c], row[c | m]);
                row[c] = a * uc[0][0] + b * uc[0][1];
                row[c | m] = a * uc[1][0] + b * uc[1][1];
            }
        }
    }

    fn conjugate_pair(&mut self, ma: usize, mb: usize, u: &[[Complex64; 4]; 4]) {
        let dim = self.dim;
        let both = ma | mb;
        let offsets = [0, mb, ma, ma | mb];
        for base in (0..dim).filter(|i| i & both == 0) {
            for c in 0..dim {
                let x: [Complex64; 4] = std::array::from_fn(|k| self.data[(base | offsets[k]) * dim + c]);
                for (k, off) in offsets.iter().enumerate() {
                    self.data[(base | off) * dim + c] =
                        u[k][0] * x[0] + u[k][1] * x[1] + u[k][2] * x[2] + u[k][3] * x[3];
                }
            }
        }
        for row in self.data.chunks_exact_mut(dim) {
            for base in (0..dim).filter(|i| i & both == 0) {
                let x: [Complex64; 4] = std::array::from_fn(|k| row[base | offsets[k]]);
                for (k, off) in offsets.iter().enumerate() {
                    row[base | off] = x[0] * u[k][0].conj()
                        + x[1] * u[k][1].conj()
                        + x[2] * u[k][2].conj()
                        + x[3] * u[k][3].conj();
                }
            }
        }
    }

    fn apply_superoperator(&mut self, m: usize, s: &[[Complex64; 4]; 4]) {
        let dim = self.dim;
        for r in (0..dim).filter(|r| r & m == 0) {
            let (head, tail) = self.data.split_at_mut((r | m) * dim);
            let row0 = &mut head[r * dim..(r + 1) * dim];
            let row1 = &mut tail[..dim];
            for c in (0..dim).filter(|c| c & m == 0) {
                let x = [row0[c], row0[c | m], row1[c], row1[c | m]];
                let y: [Complex64; 4] = std::array::from_fn(|k| {
                    s[k][0] * x[0] + s[k][1] * x[1] + s[k][2] * x[2] + s[k][3] * x[3]
                });
                row0[c] = y[0];
                row0[c | m] = y[1];
                row1[c] = y[2];
                row1[c | m] = y[3];
            }
        }
    }

    /// `Tr[ρH]`. A residual imaginary part above `1e-6` is reported as an
    /// internal-consistency error; smaller residues are dropped.
    pub fn expectation(&self, h: &PauliHamiltonian) -> Result<f64> {
        if h.n_qubits() != self.n_qubits {
            return Err(Error::domain(format!(
                "{}-qubit observable on a {}-qubit state",
                h.n_qubits(),
                self.n_qubits
            )));
        }
        let mut total = Complex64::new(0.0, 0.0);
        for term in h.terms() {
            let masks = term.masks();
            let mut z = ZERO;
            for k in 0..self.dim {
                z += masks.phase(k) * self.data[k * self.dim + (k ^ masks.x)];
            }
            total += z * term.coefficient;
        }
        if total.im.abs() > 1e-6 {
            return Err(Error::Internal(format!(
                "expectation has imaginary part {:e}",
                total.im
            )));
        }
        Ok(total.re)
    }
}

pub fn apply_gate(rho: &DensityMatrix, gate: &Gate) -> Result<DensityMatrix> {
    rho.apply_gate(gate)
}

pub fn apply_channel(rho: &DensityMatrix, channel: &KrausChannel, qubit: usize) -> Result<DensityMatrix> {
    rho.apply_channel(channel, qubit)
}

pub fn expectation(rho: &DensityMatrix, observable: &PauliHamiltonian) -> Result<f64> {
    rho.expectation(observable)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::sim::channel::damping_channel;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn close(a: &DensityMatrix, b: &DensityMatrix, tol: f64) -> bool {
        a.data.iter().zip(&b.data).all(|(x, y)| (x - y).norm() < tol)
    }

    #[test]
    fn rx_pi_flips_ground_state() {
        let rho = DensityMatrix::ground(1).apply_gate(&Gate::rx(0, PI)).unwrap();
        assert!((rho.get(1, 1).re - 1.0).abs() < 1e-15);
        assert!(rho.get(0, 0).norm() < 1e-15);
        assert!(rho.get(0, 1).norm() < 1e-15);
    }

    #[test]
    fn hadamard_gives_plus_state() {
        let rho = DensityMatrix::ground(1).apply_gate(&Gate::h(0)).unwrap();
        for r in 0..2 {
            for col in 0..2 {
                assert!((rho.get(r, col) - c(0.5)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn cnot_maps_10_to_11() {
        let mut amp = vec![c(0.0); 4];
        amp[0b10] = c(1.0);
        let rho = DensityMatrix::from_pure(&amp).unwrap();
        let out = rho.apply_gate(&Gate::cnot(0, 1)).unwrap();
        assert!((out.get(0b11, 0b11).re - 1.0).abs() < 1e-15);
        assert!(out.get(0b10, 0b10).norm() < 1e-15);
    }

    #[test]
    fn phase_damping_scales_coherences() {
        let q = 0.36;
        let plus = DensityMatrix::ground(1).apply_gate(&Gate::h(0)).unwrap();
        let out = plus.apply_channel(&damping_channel(0.0, q).unwrap(), 0).unwrap();
        assert!((out.get(0, 0).re - 0.5).abs() < 1e-14);
        assert!((out.get(1, 1).re - 0.5).abs() < 1e-14);
        let expected = 0.5 * (1.0 - q).sqrt();
        assert!((out.get(0, 1).re - expected).abs() < 1e-14);
        assert!((out.get(1, 0).re - expected).abs() < 1e-14);
    }

    #[test]
    fn identity_channel_is_a_no_op() {
        let rho = DensityMatrix::ground(2)
            .apply_gate(&Gate::ry(0, 0.7))
            .unwrap()
            .apply_gate(&Gate::cnot(0, 1))
            .unwrap();
        let out = rho.apply_channel(&KrausChannel::identity(), 1).unwrap();
        assert!(close(&rho, &out, 1e-15));
        let out = rho.apply_channel(&damping_channel(0.0, 0.0).unwrap(), 0).unwrap();
        assert!(close(&rho, &out, 1e-15));
    }

    #[test]
    fn amplitude_damping_transfers_population() {
        let excited = DensityMatrix::ground(1).apply_gate(&Gate::rx(0, PI)).unwrap();
        let out = excited.apply_channel(&damping_channel(0.2, 0.2).unwrap(), 0).unwrap();
        assert!((out.get(0, 0).re - 0.2).abs() < 1e-12);
        assert!((out.get(1, 1).re - 0.8).abs() < 1e-12);
    }

    #[test]
    fn channel_out_of_range_qubit() {
        let rho = DensityMatrix::ground(2);
        assert!(rho.apply_channel(&KrausChannel::identity(), 2).is_err());
        assert!(rho.apply_gate(&Gate::h(5)).is_err());
    }

    #[test]
    fn expectation_examples() {
        let mut z = PauliHamiltonian::new(1);
        z.add_label(1.0, "Z").unwrap();
        assert!((DensityMatrix::ground(1).expectation(&z).unwrap() - 1.0).abs() < 1e-15);

        let mut h = PauliHamiltonian::new(3);
        h.add_label(0.3, "XZI").unwrap().add_label(-1.2, "ZZZ").unwrap().add_label(0.5, "IYY").unwrap();
        assert!(DensityMatrix::maximally_mixed(3).expectation(&h).unwrap().abs() < 1e-15);

        let mut cut = PauliHamiltonian::new(2);
        cut.add_label(0.5, "II").unwrap().add_label(-0.5, "ZZ").unwrap();
        let plus2 = DensityMatrix::ground(2)
            .apply_gate(&Gate::h(0))
            .unwrap()
            .apply_gate(&Gate::h(1))
            .unwrap();
        assert!((plus2.expectation(&cut).unwrap() - 0.5).abs() < 1e-15);

        assert!(plus2.expectation(&z).is_err());
    }

    #[test]
    fn from_matrix_rejects_non_states() {
        let mut m = DMatrix::<Complex64>::identity(2, 2);
        assert!(DensityMatrix::from_matrix(&m).is_err());
        m[(1, 1)] = c(0.0);
        assert!(DensityMatrix::from_matrix(&m).is_ok());
        m[(0, 0)] = c(1.5);
        m[(1, 1)] = c(-0.5);
        assert!(DensityMatrix::from_matrix(&m).is_err());
    }
}
