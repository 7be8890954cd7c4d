use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;

/// Multi-start pattern-search budget.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OuterBudget {
    pub restarts: usize,
    pub evaluations_per_start: usize,
}

impl Default for OuterBudget {
    fn default() -> Self {
        OuterBudget {
            restarts: 32,
            evaluations_per_start: 100,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OuterResult {
    pub theta: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
}

const INITIAL_STEP: f64 = 0.25;

/// Minimizes `score` over the box: `budget.restarts` uniform starts drawn
/// from `rng`, then `incumbent` if given, each refined by a bounded
/// compass search. The best point seen wins; ties keep the earliest start.
pub fn outer_minimize<F, R>(
    score: &F,
    bounds: &[(f64, f64)],
    budget: &OuterBudget,
    incumbent: Option<&[f64]>,
    rng: &mut R,
) -> Result<OuterResult>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
    R: Rng + ?Sized,
{
    let mut starts: Vec<Vec<f64>> = (0..budget.restarts)
        .map(|_| {
            bounds
                .iter()
                .map(|&(lo, hi)| if hi > lo { rng.random_range(lo..hi) } else { lo })
                .collect()
        })
        .collect();
    if let Some(x) = incumbent {
        starts.push(x.iter().zip(bounds).map(|(&v, &(lo, hi))| v.clamp(lo, hi)).collect());
    }
    if starts.is_empty() {
        starts.push(bounds.iter().map(|&(lo, hi)| 0.5 * (lo + hi)).collect());
    }
    let evals = budget.evaluations_per_start.max(1);
    let results: Vec<OuterResult> = starts
        .into_par_iter()
        .map(|x0| compass_search(score, x0, bounds, evals))
        .collect::<Result<_>>()?;
    let evaluations = results.iter().map(|r| r.evaluations).sum();
    let mut best = results
        .into_iter()
        .reduce(|best, r| if r.value < best.value { r } else { best })
        .expect("at least one start");
    best.evaluations = evaluations;
    Ok(best)
}

/// Coordinate-wise compass search: try `±step_k` along each axis (clamped to
/// the box), accept the first improvement, halve every step after a sweep
/// without one.
pub(crate) fn compass_search<F>(score: &F, mut x: Vec<f64>, bounds: &[(f64, f64)], evals: usize) -> Result<OuterResult>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let mut fx = score(&x)?;
    let mut used = 1;
    let mut step: Vec<f64> = bounds.iter().map(|&(lo, hi)| INITIAL_STEP * (hi - lo)).collect();
    let floor: Vec<f64> = bounds.iter().map(|&(lo, hi)| 1e-12 * (hi - lo)).collect();
    'outer: while used < evals {
        let mut improved = false;
        for k in 0..x.len() {
            if step[k] <= floor[k] {
                continue;
            }
            for dir in [1.0, -1.0] {
                if used >= evals {
                    break 'outer;
                }
                let mut cand = x.clone();
                cand[k] = (x[k] + dir * step[k]).clamp(bounds[k].0, bounds[k].1);
                if cand[k] == x[k] {
                    continue;
                }
                let fc = score(&cand)?;
                used += 1;
                if fc < fx {
                    x = cand;
                    fx = fc;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            for s in &mut step {
                *s *= 0.5;
            }
            if step.iter().zip(&floor).all(|(s, f)| s <= f) {
                break;
            }
        }
    }
    Ok(OuterResult {
        theta: x,
        value: fx,
        evaluations: used,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn quadratic_minimizer() {
        let f = |x: &[f64]| -> Result<f64> { Ok((x[0] - 0.3).powi(2) + 2.0 * (x[1] + 0.4).powi(2) + 0.5 * x[0] * x[1]) };
        // ∇f = 0: 2(x−0.3) + 0.5y = 0, 4(y+0.4) + 0.5x = 0.
        let det = 2.0 * 4.0 - 0.25;
        let xs = (0.6 * 4.0 - 0.5 * -1.6) / det;
        let ys = (2.0 * -1.6 - 0.5 * 0.6) / det;
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let r = outer_minimize(&f, &[(-1.0, 1.0), (-1.0, 1.0)], &OuterBudget::default(), None, &mut rng).unwrap();
        assert!((r.theta[0] - xs).abs() < 1e-3 && (r.theta[1] - ys).abs() < 1e-3, "{:?}", r.theta);
    }

    #[test]
    fn constant_surface_returns_first_start() {
        let f = |_: &[f64]| -> Result<f64> { Ok(1.0) };
        let b = [(0.0, 2.0)];
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let r = outer_minimize(&f, &b, &OuterBudget::default(), None, &mut rng).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let first: f64 = rng.random_range(0.0..2.0);
        assert_eq!(r.theta, vec![first]);
    }
}
