use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problems::VqaProblem;

/// Objective on a regular 2-D parameter grid. Axis `k` has points
/// `lo + i·(hi − lo)/steps` for `i < steps`, so the upper bound is excluded.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Landscape {
    pub xi: f64,
    /// First-parameter values (rows).
    pub gammas: Vec<f64>,
    /// Second-parameter values (columns).
    pub betas: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    /// `(row, column)` of the smallest value; the first in row-major order on
    /// ties.
    pub argmin: (usize, usize),
    pub min: f64,
}

impl Landscape {
    /// Chebyshev distance in cells between two argmins.
    pub fn argmin_distance(&self, other: &Landscape) -> usize {
        let (a, b) = (self.argmin, other.argmin);
        a.0.abs_diff(b.0).max(a.1.abs_diff(b.1))
    }
}

fn axis(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    (0..steps).map(|i| lo + i as f64 * (hi - lo) / steps as f64).collect()
}

pub fn landscape_scan(problem: &VqaProblem, steps: (usize, usize), xi: f64) -> Result<Landscape> {
    if problem.theta_dim() != 2 {
        return Err(Error::domain(format!(
            "landscape needs a two-parameter problem, got {} parameters",
            problem.theta_dim()
        )));
    }
    if steps.0 == 0 || steps.1 == 0 {
        return Err(Error::domain("landscape needs at least one point per axis"));
    }
    let b = problem.bounds();
    let gammas = axis(b[0].0, b[0].1, steps.0);
    let betas = axis(b[1].0, b[1].1, steps.1);
    let values: Vec<Vec<f64>> = gammas
        .par_iter()
        .map(|&g| betas.iter().map(|&be| problem.evaluate(&[g, be], xi)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let mut argmin = (0, 0);
    let mut min = f64::INFINITY;
    for (i, row) in values.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if v < min {
                min = v;
                argmin = (i, j);
            }
        }
    }
    Ok(Landscape {
        xi,
        gammas,
        betas,
        values,
        argmin,
        min,
    })
}
