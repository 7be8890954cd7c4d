use crate::error::{Error, Result};

pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub(crate) fn check_lengthscale(l: f64) -> Result<()> {
    if !(l > 0.0) || !l.is_finite() {
        return Err(Error::domain(format!("lengthscale must be positive and finite, got {l}")));
    }
    Ok(())
}

/// `exp(−‖x − x₂‖² / (2l²))`.
pub fn rbf_kernel(x: &[f64], x2: &[f64], lengthscale: f64) -> Result<f64> {
    check_lengthscale(lengthscale)?;
    if x.len() != x2.len() {
        return Err(Error::domain(format!("kernel inputs of length {} and {}", x.len(), x2.len())));
    }
    Ok((-sq_dist(x, x2) / (2.0 * lengthscale * lengthscale)).exp())
}
