//! Multi-start noiseless local optimization used to fix the frozen prefix of
//! the hardware-efficient ansatz.

use std::f64::consts::PI;

use argmin::core::{CostFunction, Executor, Gradient, State};
use argmin::solver::linesearch::MoreThuenteLineSearch;
use argmin::solver::quasinewton::LBFGS;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Energy landscape of an ansatz built only from `R_P(θ) = exp(-iθP/2)`
/// rotations, so the two-point parameter-shift rule gives exact gradients.
struct ShiftRuleProblem<'a, F> {
    energy: &'a F,
}

impl<F> CostFunction for ShiftRuleProblem<'_, F>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, theta: &Self::Param) -> std::result::Result<f64, argmin::core::Error> {
        (self.energy)(theta).map_err(|e| argmin::core::Error::msg(e.to_string()))
    }
}

impl<F> Gradient for ShiftRuleProblem<'_, F>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    type Param = Vec<f64>;
    type Gradient = Vec<f64>;

    fn gradient(&self, theta: &Self::Param) -> std::result::Result<Vec<f64>, argmin::core::Error> {
        let mut shifted = theta.clone();
        let mut grad = vec![0.0; theta.len()];
        for k in 0..theta.len() {
            shifted[k] = theta[k] + PI / 2.0;
            let plus = self.cost(&shifted)?;
            shifted[k] = theta[k] - PI / 2.0;
            let minus = self.cost(&shifted)?;
            shifted[k] = theta[k];
            grad[k] = 0.5 * (plus - minus);
        }
        Ok(grad)
    }
}

fn wrap_angle(a: f64) -> f64 {
    let w = (a + PI).rem_euclid(2.0 * PI) - PI;
    if w < -PI { w + 2.0 * PI } else { w }
}

/// Best parameters found by L-BFGS from `restarts` uniform starts in
/// `[-π, π]^dim`; returned angles are wrapped back into that box.
pub fn multistart_minimize<F>(
    energy: &F,
    dim: usize,
    restarts: usize,
    max_iters: u64,
    seed: u64,
) -> Result<(Vec<f64>, f64)>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(Vec<f64>, f64)> = None;
    for _ in 0..restarts.max(1) {
        let start: Vec<f64> = (0..dim).map(|_| rng.random_range(-PI..PI)).collect();
        let problem = ShiftRuleProblem { energy };
        let solver = LBFGS::new(MoreThuenteLineSearch::new(), 7)
            .with_tolerance_grad(1e-10)
            .map_err(|e| Error::Numerical(e.to_string()))?;
        let outcome = Executor::new(problem, solver)
            .configure(|s| s.param(start.clone()).max_iters(max_iters))
            .run();
        let (theta, _) = match outcome {
            Ok(res) => {
                let state = res.state();
                match state.get_best_param() {
                    Some(p) => (p.clone(), state.get_best_cost()),
                    None => (start.clone(), f64::INFINITY),
                }
            }
            // A failed line search still leaves the start as a valid candidate.
            Err(_) => (start.clone(), f64::INFINITY),
        };
        let theta: Vec<f64> = theta.into_iter().map(wrap_angle).collect();
        let value = energy(&theta)?;
        if best.as_ref().map_or(true, |(_, b)| value < *b) {
            best = Some((theta, value));
        }
    }
    Ok(best.expect("at least one restart"))
}
