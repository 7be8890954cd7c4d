use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::{Method, OptimizerConfig, SelectionDirection};
use super::lhs::latin_hypercube;
use super::outer::{compass_search, outer_minimize};
use super::trace::{IterationRecord, OptimizationTrace};
use crate::dro::{mmd_kernel_matrix, solve_worst_case, DiscretePdf, MmdBall, NoiseGrid};
use crate::error::{Error, Result};
use crate::gp::{ei_value, lcb_value, GpModel, HyperparameterPolicy, InputScaling, Sample};
use crate::problems::VqaProblem;

/// A noisy objective `f(θ, ξ)` over a box.
pub trait Objective: Sync {
    fn bounds(&self) -> &[(f64, f64)];

    fn dim(&self) -> usize {
        self.bounds().len()
    }

    fn evaluate(&self, theta: &[f64], xi: f64) -> Result<f64>;
}

impl Objective for VqaProblem {
    fn bounds(&self) -> &[(f64, f64)] {
        VqaProblem::bounds(self)
    }

    fn evaluate(&self, theta: &[f64], xi: f64) -> Result<f64> {
        VqaProblem::evaluate(self, theta, xi)
    }
}

/// A GP fitted on normalized `(θ, ξ)` and queried row-wise over a noise grid.
#[derive(Clone, Debug)]
pub struct Surrogate {
    model: GpModel,
    scaling: InputScaling,
    xi_normalized: Vec<f64>,
}

impl Surrogate {
    pub fn fit(
        samples: &[Sample],
        bounds: &[(f64, f64)],
        grid: &NoiseGrid,
        policy: &HyperparameterPolicy,
    ) -> Result<Self> {
        let scaling = InputScaling::new(bounds.to_vec(), grid.range())?;
        let model = GpModel::fit_samples(samples, &scaling, policy)?;
        let xi_normalized = grid.levels().iter().map(|&x| scaling.xi(x)).collect();
        Ok(Surrogate {
            model,
            scaling,
            xi_normalized,
        })
    }

    pub fn model(&self) -> &GpModel {
        &self.model
    }

    pub fn scaling(&self) -> &InputScaling {
        &self.scaling
    }

    /// `(μ, σ)` at `(θ, ξ_j)` for every grid level `ξ_j`.
    pub fn row(&self, theta: &[f64]) -> Result<Vec<(f64, f64)>> {
        self.model.posterior_row(&self.scaling.theta(theta), &self.xi_normalized)
    }

    pub fn lcb_row(&self, theta: &[f64], beta: f64) -> Result<Vec<f64>> {
        Ok(self.row(theta)?.into_iter().map(|(m, s)| lcb_value(m, s, beta)).collect())
    }

    /// `⟨w, μ(θ, ·)⟩`.
    pub fn expected_mean(&self, theta: &[f64], w: &DiscretePdf) -> Result<f64> {
        let means: Vec<f64> = self.row(theta)?.into_iter().map(|(m, _)| m).collect();
        Ok(w.dot(&means))
    }
}

/// The candidate with the best `⟨w, μ(θ, ·)⟩` in `direction`; ties keep the
/// earliest candidate.
pub fn select_optimal(
    surrogate: &Surrogate,
    candidates: &[Vec<f64>],
    w: &DiscretePdf,
    direction: SelectionDirection,
) -> Result<(Vec<f64>, f64)> {
    if candidates.is_empty() {
        return Err(Error::domain("select_optimal needs at least one candidate"));
    }
    let mut best: Option<(usize, f64)> = None;
    for (i, c) in candidates.iter().enumerate() {
        let v = surrogate.expected_mean(c, w)?;
        let better = match (best, direction) {
            (None, _) => true,
            (Some((_, b)), SelectionDirection::Minimize) => v < b,
            (Some((_, b)), SelectionDirection::Maximize) => v > b,
        };
        if better {
            best = Some((i, v));
        }
    }
    let (i, v) = best.expect("non-empty candidates");
    Ok((candidates[i].clone(), v))
}

/// Per-method acquisition over a grid row.
struct Acquisition<'a> {
    method: Method,
    beta: f64,
    reference: &'a DiscretePdf,
    ball: Option<&'a MmdBall>,
    ei_form: crate::gp::EiForm,
    best_value: f64,
}

struct Scored {
    score: f64,
    weights: Vec<f64>,
    weighted_lcb: f64,
    nominal_lcb: f64,
}

impl Acquisition<'_> {
    /// The quantity the outer search minimizes.
    fn score(&self, row: &[(f64, f64)]) -> Result<f64> {
        Ok(self.evaluate(row, false)?.score)
    }

    fn evaluate(&self, row: &[(f64, f64)], detail: bool) -> Result<Scored> {
        let lcb: Vec<f64> = row.iter().map(|&(m, s)| lcb_value(m, s, self.beta)).collect();
        let (score, weights, weighted_lcb) = match self.method {
            Method::Drbo => {
                let ball = self.ball.expect("DRBO has a ball");
                let wc = solve_worst_case(&lcb, ball)?;
                let value = wc.value;
                (value, if detail { Vec::from(wc.pdf) } else { Vec::new() }, value)
            }
            Method::BoLcb => {
                let v = self.reference.dot(&lcb);
                (v, self.reference.weights().to_vec(), v)
            }
            Method::BoEi => {
                let ei: Vec<f64> = row
                    .iter()
                    .map(|&(m, s)| ei_value(m, s, self.best_value, self.ei_form))
                    .collect();
                let w = self.reference.weights().to_vec();
                (-self.reference.dot(&ei), w, self.reference.dot(&lcb))
            }
            Method::BoStable => {
                let mut j = 0;
                for (i, &v) in lcb.iter().enumerate() {
                    if v > lcb[j] {
                        j = i;
                    }
                }
                let mut w = vec![0.0; lcb.len()];
                w[j] = 1.0;
                (lcb[j], w, lcb[j])
            }
        };
        let nominal_lcb = if detail { self.reference.dot(&lcb) } else { 0.0 };
        Ok(Scored {
            score,
            weights,
            weighted_lcb,
            nominal_lcb,
        })
    }
}

fn check_inputs<O: Objective + ?Sized>(
    problem: &O,
    ref_pdf: &DiscretePdf,
    grid: &NoiseGrid,
    config: &OptimizerConfig,
) -> Result<()> {
    config.validate()?;
    if ref_pdf.len() != grid.len() {
        return Err(Error::Config(format!(
            "reference pdf has {} weights for a grid of {} levels",
            ref_pdf.len(),
            grid.len()
        )));
    }
    if problem.dim() == 0 {
        return Err(Error::Config("problem has no free parameters".into()));
    }
    Ok(())
}

/// Draws `k` grid indices from `pdf` with replacement.
fn sample_levels(pdf: &DiscretePdf, k: usize, rng: &mut ChaCha8Rng) -> Result<Vec<usize>> {
    let dist = WeightedIndex::new(pdf.weights())
        .map_err(|e| Error::Numerical(format!("cannot sample from reference pdf: {e}")))?;
    Ok((0..k).map(|_| dist.sample(rng)).collect())
}

/// Evaluates `f(θ, ξ_i)` once per distinct index and expands back to the
/// requested order.
fn evaluate_levels<O: Objective + ?Sized>(
    problem: &O,
    theta: &[f64],
    grid: &NoiseGrid,
    indices: &[usize],
) -> Result<Vec<f64>> {
    let mut unique: Vec<usize> = Vec::new();
    for &i in indices {
        if !unique.contains(&i) {
            unique.push(i);
        }
    }
    let values: Vec<f64> = unique
        .par_iter()
        .map(|&i| problem.evaluate(theta, grid.levels()[i]))
        .collect::<Result<_>>()?;
    Ok(indices
        .iter()
        .map(|i| values[unique.iter().position(|u| u == i).expect("index collected")])
        .collect())
}

/// Runs DRBO or one of the baselines and returns `θ*` with the full trace.
///
/// On a surrogate-fit failure the error is [`Error::Aborted`] carrying the
/// iterations completed so far.
pub fn run_optimizer<O: Objective + ?Sized>(
    problem: &O,
    ref_pdf: &DiscretePdf,
    grid: &NoiseGrid,
    config: &OptimizerConfig,
) -> Result<(Vec<f64>, OptimizationTrace)> {
    check_inputs(problem, ref_pdf, grid, config)?;
    let bounds = problem.bounds().to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let ball = match config.method {
        Method::Drbo => Some(MmdBall::new(
            ref_pdf.clone(),
            config.epsilon,
            mmd_kernel_matrix(grid, config.mmd_lengthscale_for(grid.spacing()))?,
        )?),
        _ => None,
    };

    let mut trace = OptimizationTrace::default();
    let design = latin_hypercube(config.init_count, &bounds, rng.next_u64())?;
    let init_levels = sample_levels(ref_pdf, config.init_count, &mut rng)?;
    let init_values: Vec<f64> = design
        .par_iter()
        .zip(&init_levels)
        .map(|(theta, &i)| problem.evaluate(theta, grid.levels()[i]))
        .collect::<Result<_>>()?;
    for ((theta, &i), value) in design.into_iter().zip(&init_levels).zip(init_values) {
        trace.initial.push(Sample {
            theta,
            xi: grid.levels()[i],
            value,
        });
    }
    let mut samples = trace.initial.clone();
    let mut incumbent = samples
        .iter()
        .reduce(|a, b| if b.value < a.value { b } else { a })
        .expect("init_count >= 2")
        .theta
        .clone();

    let abort = |source: Error, trace: &OptimizationTrace| Error::Aborted {
        source: Box::new(source),
        partial: Box::new(trace.clone()),
    };

    for t in 1..=config.max_iterations {
        let surrogate = match Surrogate::fit(&samples, &bounds, grid, &config.gp) {
            Ok(s) => s,
            Err(e) => return Err(abort(e, &trace)),
        };
        let best_value = samples.iter().map(|s| s.value).fold(f64::INFINITY, f64::min);
        let acquisition = Acquisition {
            method: config.method,
            beta: config.beta,
            reference: ref_pdf,
            ball: ball.as_ref(),
            ei_form: config.ei_form,
            best_value,
        };
        let score = |theta: &[f64]| acquisition.score(&surrogate.row(theta)?);
        let outer = outer_minimize(&score, &bounds, &config.outer, Some(&incumbent), &mut rng)?;
        let detail = acquisition.evaluate(&surrogate.row(&outer.theta)?, true)?;

        let levels = sample_levels(ref_pdf, config.batch_size, &mut rng)?;
        let values = evaluate_levels(problem, &outer.theta, grid, &levels)?;
        let xis: Vec<f64> = levels.iter().map(|&i| grid.levels()[i]).collect();
        for (&xi, &value) in xis.iter().zip(&values) {
            samples.push(Sample {
                theta: outer.theta.clone(),
                xi,
                value,
            });
        }
        trace.records.push(IterationRecord {
            iteration: t,
            theta: outer.theta.clone(),
            score: outer.value,
            weights: detail.weights,
            weighted_lcb: detail.weighted_lcb,
            nominal_lcb: detail.nominal_lcb,
            xis,
            values,
            lengthscale: surrogate.model().lengthscale(),
            noise_std: surrogate.model().noise_std(),
        });
        incumbent = outer.theta;
    }

    let surrogate = match Surrogate::fit(&samples, &bounds, grid, &config.gp) {
        Ok(s) => s,
        Err(e) => return Err(abort(e, &trace)),
    };
    let sign = match config.selection {
        SelectionDirection::Minimize => 1.0,
        SelectionDirection::Maximize => -1.0,
    };
    let posterior_score = |theta: &[f64]| Ok(sign * surrogate.expected_mean(theta, ref_pdf)?);
    let final_outer = outer_minimize(&posterior_score, &bounds, &config.outer, Some(&incumbent), &mut rng)?;
    let mut candidates: Vec<Vec<f64>> = trace.initial.iter().map(|s| s.theta.clone()).collect();
    candidates.extend(trace.records.iter().map(|r| r.theta.clone()));
    candidates.push(final_outer.theta);
    let (mut theta_star, mut star_score) = select_optimal(&surrogate, &candidates, ref_pdf, config.selection)?;

    if config.warm_start_evaluations > 0 {
        let expected = |theta: &[f64]| -> Result<f64> {
            let values = evaluate_levels(problem, theta, grid, &(0..grid.len()).collect::<Vec<_>>())?;
            Ok(ref_pdf.dot(&values))
        };
        let refined = compass_search(&expected, theta_star, &bounds, config.warm_start_evaluations)?;
        theta_star = refined.theta;
        star_score = surrogate.expected_mean(&theta_star, ref_pdf)?;
    }
    trace.theta_star = theta_star.clone();
    trace.theta_star_score = star_score;
    Ok((theta_star, trace))
}

