use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::graph::Graph;
use crate::error::{Error, Result};
use crate::sim::{Pauli, PauliHamiltonian};

pub const MAX_EXACT_QUBITS: usize = 12;
pub const MAX_BRUTE_FORCE_VERTICES: usize = 24;

/// `H_C = Σ_{(i,j)∈E} ½(I − Z_i Z_j)`, whose diagonal counts cut edges.
pub fn maxcut_hamiltonian(graph: &Graph) -> PauliHamiltonian {
    let n = graph.n_vertices();
    let mut h = PauliHamiltonian::new(n);
    for &(i, j) in graph.edges() {
        h.add_sparse(0.5, &[]).expect("identity term");
        h.add_sparse(-0.5, &[(i, Pauli::Z), (j, Pauli::Z)])
            .expect("edge endpoints validated by Graph");
    }
    h
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    #[default]
    Open,
    Periodic,
}

/// `H = J Σ_i (X_i X_{i+1} + Y_i Y_{i+1} + Z_i Z_{i+1}) + B Σ_i Z_i`.
pub fn heisenberg_hamiltonian(n: usize, j: f64, b: f64) -> Result<PauliHamiltonian> {
    heisenberg_hamiltonian_with(n, j, b, Boundary::Open)
}

/// Heisenberg chain with a chosen boundary; the periodic wrap bond is only
/// added for `n > 2`.
pub fn heisenberg_hamiltonian_with(
    n: usize,
    j: f64,
    b: f64,
    boundary: Boundary,
) -> Result<PauliHamiltonian> {
    if n < 2 {
        return Err(Error::domain(format!("Heisenberg chain needs n >= 2, got {n}")));
    }
    let mut bonds: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
    if boundary == Boundary::Periodic && n > 2 {
        bonds.push((n - 1, 0));
    }
    let mut h = PauliHamiltonian::new(n);
    for (p, q) in bonds {
        for pauli in [Pauli::X, Pauli::Y, Pauli::Z] {
            h.add_sparse(j, &[(p, pauli), (q, pauli)])?;
        }
    }
    for i in 0..n {
        h.add_sparse(b, &[(i, Pauli::Z)])?;
    }
    Ok(h)
}

/// Smallest eigenvalue of the dense matrix of `h`.
pub fn exact_ground_energy(h: &PauliHamiltonian) -> Result<f64> {
    let n = h.n_qubits();
    if n > MAX_EXACT_QUBITS {
        return Err(Error::Resource(format!(
            "exact diagonalization limited to {MAX_EXACT_QUBITS} qubits, got {n}"
        )));
    }
    let dense = h.to_dense();
    let min = if h.is_real() {
        let real = DMatrix::from_fn(dense.nrows(), dense.ncols(), |r, c| dense[(r, c)].re);
        SymmetricEigen::new(real).eigenvalues.min()
    } else {
        SymmetricEigen::new(dense).eigenvalues.min()
    };
    Ok(min)
}

/// Exact maximum cut by enumerating the `2^(n-1)` bipartitions with the last
/// vertex pinned to side 0.
pub fn brute_force_maxcut(graph: &Graph) -> Result<usize> {
    let n = graph.n_vertices();
    if n > MAX_BRUTE_FORCE_VERTICES {
        return Err(Error::Resource(format!(
            "brute-force MaxCut limited to {MAX_BRUTE_FORCE_VERTICES} vertices, got {n}"
        )));
    }
    if n < 2 {
        return Ok(0);
    }
    let masks: Vec<u32> = graph
        .edges()
        .iter()
        .map(|&(u, v)| (1u32 << u) | (1u32 << v))
        .collect();
    let best = (0u32..1u32 << (n - 1))
        .map(|side| {
            masks
                .iter()
                .filter(|&&m| (side & m).count_ones() == 1)
                .count()
        })
        .max()
        .unwrap_or(0);
    Ok(best)
}

/// Ground energy of one Heisenberg convention.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConventionEnergy {
    /// Effective coupling: `+J` (antiferromagnetic as written) or `−J`.
    pub coupling: f64,
    pub boundary: Boundary,
    pub ground_energy: f64,
    pub matches_target: bool,
}

/// Ground energies of the chain under both coupling signs and both boundary
/// conditions, each compared against `target` within `tol`.
pub fn heisenberg_convention_audit(
    n: usize,
    j: f64,
    b: f64,
    target: f64,
    tol: f64,
) -> Result<Vec<ConventionEnergy>> {
    let mut out = Vec::with_capacity(4);
    for coupling in [j, -j] {
        for boundary in [Boundary::Open, Boundary::Periodic] {
            let e = exact_ground_energy(&heisenberg_hamiltonian_with(n, coupling, b, boundary)?)?;
            out.push(ConventionEnergy {
                coupling,
                boundary,
                ground_energy: e,
                matches_target: (e - target).abs() <= tol,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::DensityMatrix;
    use num_complex::Complex64;

    fn basis(n: usize, index: usize) -> DensityMatrix {
        let mut amp = vec![Complex64::new(0.0, 0.0); 1 << n];
        amp[index] = Complex64::new(1.0, 0.0);
        DensityMatrix::from_pure(&amp).unwrap()
    }

    #[test]
    fn maxcut_counts_cut_edges() {
        let k3 = Graph::complete(3).unwrap();
        let h = maxcut_hamiltonian(&k3);
        assert!((basis(3, 0b001).expectation(&h).unwrap() - 2.0).abs() < 1e-14);
        let empty = Graph::new(3, []).unwrap();
        let h0 = maxcut_hamiltonian(&empty);
        assert!(h0.terms().is_empty());
        assert_eq!(basis(3, 0b101).expectation(&h0).unwrap(), 0.0);
    }

    #[test]
    fn two_spin_ground_energies() {
        let singlet = exact_ground_energy(&heisenberg_hamiltonian(2, 1.0, 0.0).unwrap()).unwrap();
        assert!((singlet + 3.0).abs() < 1e-12);
        let field = exact_ground_energy(&heisenberg_hamiltonian(2, 0.0, 1.0).unwrap()).unwrap();
        assert!((field + 2.0).abs() < 1e-12);
        assert!(heisenberg_hamiltonian(1, 1.0, 0.0).is_err());
    }

    #[test]
    fn small_exact_energies() {
        let mut z = PauliHamiltonian::new(1);
        z.add_label(1.0, "Z").unwrap();
        assert!((exact_ground_energy(&z).unwrap() + 1.0).abs() < 1e-14);
        let k3 = maxcut_hamiltonian(&Graph::complete(3).unwrap()).scaled(-1.0);
        assert!((exact_ground_energy(&k3).unwrap() + 2.0).abs() < 1e-12);
        assert!(matches!(
            exact_ground_energy(&PauliHamiltonian::new(13)),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn brute_force_small_graphs() {
        assert_eq!(brute_force_maxcut(&Graph::complete(3).unwrap()).unwrap(), 2);
        assert_eq!(brute_force_maxcut(&Graph::cycle(5).unwrap()).unwrap(), 4);
        assert_eq!(brute_force_maxcut(&Graph::new(1, []).unwrap()).unwrap(), 0);
        assert!(brute_force_maxcut(&Graph::new(25, []).unwrap()).is_err());
    }
}
