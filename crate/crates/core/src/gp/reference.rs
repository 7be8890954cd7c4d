//! Direct dense-solve posterior used as a cross-check of [`GpModel`].
//!
//! Solves `(K + sI)x = k` by LU for every query, with `s` the total diagonal
//! term of the fitted model, and applies the same target standardization.

use nalgebra::{DMatrix, DVector};

use super::kernel::sq_dist;
use super::model::GpModel;
use crate::error::{Error, Result};

pub fn dense_posterior(model: &GpModel, x: &[f64]) -> Result<(f64, f64)> {
    let inputs = model.inputs();
    let n = inputs.len();
    let l = model.lengthscale();
    let k = |a: &[f64], b: &[f64]| (-sq_dist(a, b) / (2.0 * l * l)).exp();
    let diag = model.noise_std().powi(2) + model.jitter();
    let mut gram = DMatrix::from_fn(n, n, |i, j| k(&inputs[i], &inputs[j]));
    for i in 0..n {
        gram[(i, i)] += diag;
    }
    let (ym, ys) = model.target_standardization();
    let lu = gram.lu();
    let kx = DVector::from_fn(n, |i, _| k(x, &inputs[i]));
    let solved = lu
        .solve(&kx)
        .ok_or_else(|| Error::Numerical("reference Gram matrix is singular".into()))?;
    let mean: f64 = solved.iter().zip(model.targets()).map(|(a, y)| a * (y - ym) / ys).sum();
    let var = 1.0 - kx.dot(&solved);
    Ok((ym + ys * mean, ys * var.max(0.0).sqrt()))
}
