use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_GRID_SIZE: usize = 20;
pub const DEFAULT_GRID_MAX: f64 = 0.08;

/// Sum-to-one tolerance for [`DiscretePdf`].
pub const PDF_SUM_TOL: f64 = 1e-12;

/// Discretized noise levels `ξ_1 < … < ξ_n` in `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct NoiseGrid {
    levels: Vec<f64>,
}

impl NoiseGrid {
    pub fn new(levels: Vec<f64>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::domain("noise grid must have at least one level"));
        }
        if levels.iter().any(|&x| !(0.0..=1.0).contains(&x)) {
            return Err(Error::domain("noise levels must lie in [0, 1]"));
        }
        if levels.windows(2).any(|p| p[1] <= p[0]) {
            return Err(Error::domain("noise levels must be strictly increasing"));
        }
        Ok(NoiseGrid { levels })
    }

    /// `n` evenly spaced levels from `lo` to `hi` inclusive.
    pub fn uniform(n: usize, lo: f64, hi: f64) -> Result<Self> {
        match n {
            0 => Err(Error::domain("noise grid must have at least one level")),
            1 => Self::new(vec![lo]),
            _ => {
                let step = (hi - lo) / (n - 1) as f64;
                let mut levels: Vec<f64> = (0..n).map(|i| lo + step * i as f64).collect();
                levels[n - 1] = hi;
                Self::new(levels)
            }
        }
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn range(&self) -> (f64, f64) {
        (self.levels[0], self.levels[self.levels.len() - 1])
    }

    /// Smallest gap between adjacent levels; 0 for a single-level grid.
    pub fn spacing(&self) -> f64 {
        self.levels
            .windows(2)
            .map(|p| p[1] - p[0])
            .reduce(f64::min)
            .unwrap_or(0.0)
    }

    /// Index of a level equal to `xi` bit for bit.
    pub fn index_of(&self, xi: f64) -> Option<usize> {
        self.levels.iter().position(|&l| l == xi)
    }

    /// Affine map of `xi` onto `[0, 1]` over the grid range; 0 for a
    /// single-level grid.
    pub fn normalize(&self, xi: f64) -> f64 {
        let (lo, hi) = self.range();
        if hi > lo {
            (xi - lo) / (hi - lo)
        } else {
            0.0
        }
    }
}

impl Default for NoiseGrid {
    fn default() -> Self {
        NoiseGrid::uniform(DEFAULT_GRID_SIZE, 0.0, DEFAULT_GRID_MAX).expect("valid default grid")
    }
}

impl TryFrom<Vec<f64>> for NoiseGrid {
    type Error = Error;
    fn try_from(levels: Vec<f64>) -> Result<Self> {
        NoiseGrid::new(levels)
    }
}

impl From<NoiseGrid> for Vec<f64> {
    fn from(grid: NoiseGrid) -> Self {
        grid.levels
    }
}

/// Probability weights over the levels of a [`NoiseGrid`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct DiscretePdf {
    weights: Vec<f64>,
}

impl DiscretePdf {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::domain("pdf must have at least one weight"));
        }
        if weights.iter().any(|&x| !(0.0..=1.0).contains(&x)) {
            return Err(Error::domain("pdf weights must lie in [0, 1]"));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > PDF_SUM_TOL {
            return Err(Error::domain(format!("pdf weights sum to {sum}, not 1")));
        }
        Ok(DiscretePdf { weights })
    }

    /// Normalizes non-negative masses to sum one.
    pub fn from_masses(masses: &[f64]) -> Result<Self> {
        if masses.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
            return Err(Error::domain("masses must be finite and non-negative"));
        }
        let total: f64 = masses.iter().sum();
        if !(total > 0.0) {
            return Err(Error::domain("masses sum to zero"));
        }
        Self::new(masses.iter().map(|m| m / total).collect())
    }

    pub fn uniform(n: usize) -> Result<Self> {
        Self::from_masses(&vec![1.0; n])
    }

    /// All mass on level `j`.
    pub fn dirac(n: usize, j: usize) -> Result<Self> {
        if j >= n {
            return Err(Error::domain(format!("dirac index {j} out of range for {n} levels")));
        }
        let mut w = vec![0.0; n];
        w[j] = 1.0;
        Self::new(w)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `Σ w_i x_i`, accumulated in index order.
    pub fn dot(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.weights.len());
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }

    pub fn mean(&self, grid: &NoiseGrid) -> f64 {
        self.dot(grid.levels())
    }
}

impl TryFrom<Vec<f64>> for DiscretePdf {
    type Error = Error;
    fn try_from(weights: Vec<f64>) -> Result<Self> {
        DiscretePdf::new(weights)
    }
}

impl From<DiscretePdf> for Vec<f64> {
    fn from(pdf: DiscretePdf) -> Self {
        pdf.weights
    }
}

/// Gaussian density evaluated on the grid and renormalized.
pub fn truncated_gaussian_pdf(mean: f64, std: f64, grid: &NoiseGrid) -> Result<DiscretePdf> {
    if !(std > 0.0) || !std.is_finite() || !mean.is_finite() {
        return Err(Error::domain(format!(
            "truncated Gaussian needs finite mean and std > 0, got ({mean}, {std})"
        )));
    }
    let masses: Vec<f64> = grid
        .levels()
        .iter()
        .map(|&x| (-0.5 * ((x - mean) / std).powi(2)).exp())
        .collect();
    if masses.iter().all(|&m| m == 0.0) {
        return Err(Error::domain(format!(
            "Gaussian ({mean}, {std}) underflows on every grid level"
        )));
    }
    DiscretePdf::from_masses(&masses)
}
