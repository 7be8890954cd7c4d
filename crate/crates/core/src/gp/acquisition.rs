use serde::{Deserialize, Serialize};
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use super::model::GpModel;
use crate::error::{Error, Result};

pub const DEFAULT_BETA: f64 = 2.0;

/// Which expected-improvement formula to use.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EiForm {
    /// `Φ(z)(best − μ) + φ(z)σ` with `z = 0` when `σ = 0`; unclamped.
    #[default]
    Paper,
    /// The textbook form, `max(best − μ, 0)` when `σ = 0`.
    Standard,
}

/// `μ − βσ`.
pub fn lcb_value(mu: f64, sigma: f64, beta: f64) -> f64 {
    mu - beta * sigma
}

pub fn ei_value(mu: f64, sigma: f64, best: f64, form: EiForm) -> f64 {
    let improvement = best - mu;
    if sigma > 0.0 {
        let n = Normal::standard();
        let z = improvement / sigma;
        n.cdf(z) * improvement + n.pdf(z) * sigma
    } else {
        match form {
            EiForm::Paper => 0.5 * improvement + Normal::standard().pdf(0.0) * sigma,
            EiForm::Standard => improvement.max(0.0),
        }
    }
}

pub fn lcb(model: &GpModel, x: &[f64], beta: f64) -> Result<f64> {
    if !(beta >= 0.0) {
        return Err(Error::domain(format!("LCB beta must be >= 0, got {beta}")));
    }
    let (mu, sigma) = model.posterior(x)?;
    Ok(lcb_value(mu, sigma, beta))
}

pub fn ei(model: &GpModel, x: &[f64], best_value: f64) -> Result<f64> {
    ei_with_form(model, x, best_value, EiForm::Paper)
}

pub fn ei_with_form(model: &GpModel, x: &[f64], best_value: f64, form: EiForm) -> Result<f64> {
    if !best_value.is_finite() {
        return Err(Error::domain("EI best value must be finite"));
    }
    let (mu, sigma) = model.posterior(x)?;
    Ok(ei_value(mu, sigma, best_value, form))
}
