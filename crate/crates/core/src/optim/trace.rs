use serde::{Deserialize, Serialize};

use crate::gp::Sample;

/// One iteration of the loop.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    /// Parameters selected by the outer search and evaluated this iteration.
    pub theta: Vec<f64>,
    /// Surrogate score minimized by the outer search at `theta`.
    pub score: f64,
    /// Weights the method placed on the noise grid at `theta`: the worst-case
    /// pdf for DRBO, the reference pdf for BO-LCB and BO-EI, and a one-hot
    /// vector on the worst level for BO-Stable.
    pub weights: Vec<f64>,
    /// `⟨weights, LCB(theta, ·)⟩`.
    pub weighted_lcb: f64,
    /// `⟨w, LCB(theta, ·)⟩` under the reference pdf.
    pub nominal_lcb: f64,
    pub xis: Vec<f64>,
    pub values: Vec<f64>,
    pub lengthscale: f64,
    pub noise_std: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct OptimizationTrace {
    pub initial: Vec<Sample>,
    pub records: Vec<IterationRecord>,
    /// Selected parameters; empty until the run completes.
    pub theta_star: Vec<f64>,
    /// `⟨w, μ(θ*, ·)⟩` under the final surrogate.
    pub theta_star_score: f64,
}

impl OptimizationTrace {
    /// All samples in dataset order.
    pub fn samples(&self) -> Vec<Sample> {
        let mut out = self.initial.clone();
        for r in &self.records {
            for (&xi, &value) in r.xis.iter().zip(&r.values) {
                out.push(Sample {
                    theta: r.theta.clone(),
                    xi,
                    value,
                });
            }
        }
        out
    }
}
