use nalgebra::{DMatrix, DVector};

use super::grid::{DiscretePdf, NoiseGrid};
use crate::error::{Error, Result};

pub const DEFAULT_EPSILON: f64 = 0.1;
/// Default MMD kernel lengthscale in units of the grid spacing.
pub const DEFAULT_LENGTHSCALE_FACTOR: f64 = 2.0;

const SYMMETRY_TOL: f64 = 1e-12;
const QUADRATIC_FORM_TOL: f64 = 1e-12;
const JITTER_SCALE: f64 = 1e-12;

/// `M_ij = exp(−(ξ_i − ξ_j)² / (2 l²))`.
pub fn mmd_kernel_matrix(grid: &NoiseGrid, lengthscale: f64) -> Result<DMatrix<f64>> {
    if !(lengthscale > 0.0) {
        return Err(Error::domain(format!("MMD lengthscale must be positive, got {lengthscale}")));
    }
    let x = grid.levels();
    let n = x.len();
    let two_l2 = 2.0 * lengthscale * lengthscale;
    Ok(DMatrix::from_fn(n, n, |i, j| (-(x[i] - x[j]).powi(2) / two_l2).exp()))
}

/// `dᵀ M d` for `d = a − b`.
fn quadratic_form(a: &[f64], b: &[f64], m: &DMatrix<f64>) -> f64 {
    let d = DVector::from_iterator(a.len(), a.iter().zip(b).map(|(x, y)| x - y));
    d.dot(&(m * &d))
}

fn check_dims(a: usize, b: usize, m: &DMatrix<f64>) -> Result<()> {
    if a != b || m.nrows() != a || m.ncols() != a {
        return Err(Error::domain(format!(
            "dimension mismatch: weights {a} and {b}, kernel {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

/// `√((w − w₂)ᵀ M (w − w₂))`.
pub fn mmd_distance(w: &DiscretePdf, w2: &DiscretePdf, m: &DMatrix<f64>) -> Result<f64> {
    mmd_distance_raw(w.weights(), w2.weights(), m)
}

pub(crate) fn mmd_distance_raw(w: &[f64], w2: &[f64], m: &DMatrix<f64>) -> Result<f64> {
    check_dims(w.len(), w2.len(), m)?;
    let q = quadratic_form(w, w2, m);
    if q < -QUADRATIC_FORM_TOL {
        return Err(Error::Numerical(format!(
            "kernel matrix is not PSD: quadratic form {q}"
        )));
    }
    Ok(q.max(0.0).sqrt())
}

/// The ambiguity set `{w′ : D(center, w′) ≤ radius}` on the simplex.
#[derive(Clone, Debug, PartialEq)]
pub struct MmdBall {
    center: DiscretePdf,
    radius: f64,
    kernel: DMatrix<f64>,
    /// `kernel` with `1e-12·tr/n` added to the diagonal.
    jittered: DMatrix<f64>,
}

impl MmdBall {
    pub fn new(center: DiscretePdf, radius: f64, kernel: DMatrix<f64>) -> Result<Self> {
        if !(radius >= 0.0) || !radius.is_finite() {
            return Err(Error::domain(format!("ball radius must be finite and >= 0, got {radius}")));
        }
        let n = center.len();
        check_dims(n, n, &kernel)?;
        for i in 0..n {
            for j in 0..i {
                if (kernel[(i, j)] - kernel[(j, i)]).abs() > SYMMETRY_TOL {
                    return Err(Error::domain(format!("kernel matrix not symmetric at ({i}, {j})")));
                }
            }
        }
        let jitter = JITTER_SCALE * kernel.trace() / n as f64;
        let mut jittered = kernel.clone();
        for i in 0..n {
            jittered[(i, i)] += jitter;
        }
        if jittered.clone().cholesky().is_none() {
            return Err(Error::Numerical("kernel matrix is not PSD after jitter".into()));
        }
        Ok(MmdBall {
            center,
            radius,
            kernel,
            jittered,
        })
    }

    /// Ball with the RBF kernel at `DEFAULT_LENGTHSCALE_FACTOR` grid spacings.
    pub fn with_default_kernel(grid: &NoiseGrid, center: DiscretePdf, radius: f64) -> Result<Self> {
        let spacing = grid.spacing();
        let lengthscale = if spacing > 0.0 {
            DEFAULT_LENGTHSCALE_FACTOR * spacing
        } else {
            1.0
        };
        Self::new(center, radius, mmd_kernel_matrix(grid, lengthscale)?)
    }

    pub fn center(&self) -> &DiscretePdf {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn kernel(&self) -> &DMatrix<f64> {
        &self.kernel
    }

    pub(crate) fn jittered_kernel(&self) -> &DMatrix<f64> {
        &self.jittered
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// Same center and kernel, different radius.
    pub fn with_radius(&self, radius: f64) -> Result<Self> {
        if !(radius >= 0.0) || !radius.is_finite() {
            return Err(Error::domain(format!("ball radius must be finite and >= 0, got {radius}")));
        }
        Ok(MmdBall {
            radius,
            ..self.clone()
        })
    }

    pub fn distance_from_center(&self, w: &[f64]) -> Result<f64> {
        mmd_distance_raw(self.center.weights(), w, &self.kernel)
    }
}
