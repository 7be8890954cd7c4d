use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::{Deserialize, Serialize};

use super::kernel::{check_lengthscale, sq_dist};
use crate::error::{Error, Result};

/// Smallest observation-noise standard deviation, in standardized units.
pub const NOISE_FLOOR: f64 = 1e-6;

pub const LENGTHSCALE_GRID: (f64, f64, usize) = (0.05, 1.0, 16);
pub const NOISE_GRID: (f64, f64, usize) = (1e-4, 1e-1, 8);

const JITTER_START: f64 = 1e-10;
const JITTER_MAX: f64 = 1e-6;

/// An observation `f(θ, ξ)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub theta: Vec<f64>,
    pub xi: f64,
    pub value: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum HyperparameterPolicy {
    Fixed { lengthscale: f64, noise_std: f64 },
    /// Maximum log marginal likelihood over log-spaced lengthscale and
    /// noise grids.
    GridSearch,
}

impl Default for HyperparameterPolicy {
    fn default() -> Self {
        HyperparameterPolicy::GridSearch
    }
}

/// Affine map of `(θ, ξ)` onto the unit cube.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputScaling {
    pub theta_bounds: Vec<(f64, f64)>,
    pub xi_range: (f64, f64),
}

impl InputScaling {
    pub fn new(theta_bounds: Vec<(f64, f64)>, xi_range: (f64, f64)) -> Result<Self> {
        let ok = |(lo, hi): (f64, f64)| lo.is_finite() && hi.is_finite() && lo <= hi;
        if !theta_bounds.iter().copied().all(ok) || !ok(xi_range) {
            return Err(Error::domain("scaling bounds must be finite with lo <= hi"));
        }
        Ok(InputScaling {
            theta_bounds,
            xi_range,
        })
    }

    pub fn dim(&self) -> usize {
        self.theta_bounds.len() + 1
    }

    fn unit(x: f64, (lo, hi): (f64, f64)) -> f64 {
        if hi > lo {
            (x - lo) / (hi - lo)
        } else {
            0.0
        }
    }

    pub fn theta(&self, theta: &[f64]) -> Vec<f64> {
        theta
            .iter()
            .zip(&self.theta_bounds)
            .map(|(&t, &b)| Self::unit(t, b))
            .collect()
    }

    pub fn xi(&self, xi: f64) -> f64 {
        Self::unit(xi, self.xi_range)
    }

    /// Normalized joint input `(θ̃, ξ̃)`.
    pub fn joint(&self, theta: &[f64], xi: f64) -> Vec<f64> {
        let mut x = self.theta(theta);
        x.push(self.xi(xi));
        x
    }
}

/// Zero-mean GP with unit-amplitude RBF kernel on standardized targets.
///
/// Targets are centered by their mean and divided by their population
/// standard deviation (1 if zero); predictions are mapped back.
#[derive(Clone, Debug)]
pub struct GpModel {
    inputs: Vec<Vec<f64>>,
    targets: Vec<f64>,
    y_mean: f64,
    y_std: f64,
    lengthscale: f64,
    noise_std: f64,
    jitter: f64,
    chol: Cholesky<f64, Dyn>,
    /// `(K + (ε² + jitter)I)⁻¹ ỹ` for standardized targets `ỹ`.
    alpha: DVector<f64>,
    /// Dense inverse used by [`GpModel::posterior_row`].
    k_inv: DMatrix<f64>,
    /// Training points grouped by bitwise-equal last coordinate.
    last_groups: Vec<(f64, Vec<usize>)>,
    log_marginal_likelihood: f64,
}

fn kernel_matrix(inputs: &[Vec<f64>], lengthscale: f64) -> DMatrix<f64> {
    let n = inputs.len();
    let two_l2 = 2.0 * lengthscale * lengthscale;
    let mut k = DMatrix::from_element(n, n, 1.0);
    for i in 0..n {
        for j in 0..i {
            let v = (-sq_dist(&inputs[i], &inputs[j]) / two_l2).exp();
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    k
}

/// Cholesky of `K + ε²I`, escalating jitter from `1e-10` to `1e-6` times the
/// mean diagonal. Returns the factor and the jitter used.
fn factor(k: &DMatrix<f64>, noise_std: f64) -> Option<(Cholesky<f64, Dyn>, f64)> {
    let n = k.nrows();
    let base = noise_std * noise_std;
    let mean_diag = 1.0 + base;
    let mut jitter = 0.0;
    let mut next = JITTER_START * mean_diag;
    loop {
        let mut a = k.clone();
        for i in 0..n {
            a[(i, i)] += base + jitter;
        }
        if let Some(c) = a.cholesky() {
            return Some((c, jitter));
        }
        if next > JITTER_MAX * mean_diag * (1.0 + 1e-12) {
            return None;
        }
        jitter = next;
        next *= 2.0;
    }
}

fn log_marginal_likelihood(chol: &Cholesky<f64, Dyn>, y: &DVector<f64>, alpha: &DVector<f64>) -> f64 {
    let n = y.len() as f64;
    let log_det_half: f64 = chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum();
    -0.5 * y.dot(alpha) - log_det_half - 0.5 * n * (2.0 * std::f64::consts::PI).ln()
}

pub(crate) fn log_grid((lo, hi, n): (f64, f64, usize)) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    let mut out: Vec<f64> = (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect();
    out[0] = lo;
    out[n - 1] = hi;
    out
}

impl GpModel {
    /// Fits on normalized inputs.
    pub fn fit(inputs: &[Vec<f64>], targets: &[f64], policy: &HyperparameterPolicy) -> Result<Self> {
        let n = inputs.len();
        if n < 2 {
            return Err(Error::domain(format!("GP fit needs at least 2 samples, got {n}")));
        }
        if targets.len() != n {
            return Err(Error::domain(format!("{n} inputs but {} targets", targets.len())));
        }
        let dim = inputs[0].len();
        if dim == 0 || inputs.iter().any(|x| x.len() != dim) {
            return Err(Error::domain("inputs must share a non-zero dimension"));
        }
        if inputs.iter().flatten().chain(targets).any(|v| !v.is_finite()) {
            return Err(Error::domain("GP inputs and targets must be finite"));
        }
        let y_mean = targets.iter().sum::<f64>() / n as f64;
        let var = targets.iter().map(|y| (y - y_mean).powi(2)).sum::<f64>() / n as f64;
        let y_std = if var > 0.0 { var.sqrt() } else { 1.0 };
        let y = DVector::from_iterator(n, targets.iter().map(|t| (t - y_mean) / y_std));

        let candidates: Vec<(f64, f64)> = match *policy {
            HyperparameterPolicy::Fixed {
                lengthscale,
                noise_std,
            } => {
                check_lengthscale(lengthscale)?;
                if !(noise_std >= NOISE_FLOOR) || !noise_std.is_finite() {
                    return Err(Error::domain(format!(
                        "noise std {noise_std} below the floor {NOISE_FLOOR}"
                    )));
                }
                vec![(lengthscale, noise_std)]
            }
            HyperparameterPolicy::GridSearch => {
                let noises = log_grid(NOISE_GRID);
                log_grid(LENGTHSCALE_GRID)
                    .into_iter()
                    .flat_map(|l| noises.iter().map(move |&e| (l, e)))
                    .collect()
            }
        };

        let mut best: Option<(f64, f64, f64, Cholesky<f64, Dyn>, f64, DVector<f64>)> = None;
        let mut cached: Option<(f64, DMatrix<f64>)> = None;
        for (l, eps) in candidates {
            if cached.as_ref().map_or(true, |(cl, _)| *cl != l) {
                cached = Some((l, kernel_matrix(inputs, l)));
            }
            let k = &cached.as_ref().expect("kernel cached").1;
            let Some((chol, jitter)) = factor(k, eps) else {
                continue;
            };
            let alpha = chol.solve(&y);
            let lml = log_marginal_likelihood(&chol, &y, &alpha);
            if !lml.is_finite() {
                continue;
            }
            if best.as_ref().map_or(true, |b| lml > b.0) {
                best = Some((lml, l, eps, chol, jitter, alpha));
            }
        }
        let (lml, lengthscale, noise_std, chol, jitter, alpha) = best.ok_or_else(|| {
            Error::Numerical(format!(
                "K + eps^2 I is singular for every hyperparameter candidate ({n} samples, jitter up to {JITTER_MAX:e})"
            ))
        })?;
        let k_inv = chol.inverse();

        let mut last_groups: Vec<(f64, Vec<usize>)> = Vec::new();
        for (i, x) in inputs.iter().enumerate() {
            let key = x[dim - 1];
            match last_groups.iter_mut().find(|(v, _)| v.to_bits() == key.to_bits()) {
                Some((_, members)) => members.push(i),
                None => last_groups.push((key, vec![i])),
            }
        }

        Ok(GpModel {
            inputs: inputs.to_vec(),
            targets: targets.to_vec(),
            y_mean,
            y_std,
            lengthscale,
            noise_std,
            jitter,
            chol,
            alpha,
            k_inv,
            last_groups,
            log_marginal_likelihood: lml,
        })
    }

    /// Fits on raw samples normalized through `scaling`.
    pub fn fit_samples(samples: &[Sample], scaling: &InputScaling, policy: &HyperparameterPolicy) -> Result<Self> {
        let inputs: Vec<Vec<f64>> = samples.iter().map(|s| scaling.joint(&s.theta, s.xi)).collect();
        let targets: Vec<f64> = samples.iter().map(|s| s.value).collect();
        Self::fit(&inputs, &targets, policy)
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.inputs[0].len()
    }

    pub fn inputs(&self) -> &[Vec<f64>] {
        &self.inputs
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn lengthscale(&self) -> f64 {
        self.lengthscale
    }

    pub fn noise_std(&self) -> f64 {
        self.noise_std
    }

    /// Extra diagonal added on top of `ε²` to make the factorization succeed.
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    /// `(mean, population std)` used to standardize the targets.
    pub fn target_standardization(&self) -> (f64, f64) {
        (self.y_mean, self.y_std)
    }

    pub fn log_marginal_likelihood(&self) -> f64 {
        self.log_marginal_likelihood
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::domain(format!(
                "query has dimension {}, model has {}",
                x.len(),
                self.dim()
            )));
        }
        Ok(())
    }

    /// Standardized mean and pre-clamp variance.
    fn standardized(&self, x: &[f64]) -> (f64, f64) {
        let two_l2 = 2.0 * self.lengthscale * self.lengthscale;
        let k = DVector::from_iterator(
            self.len(),
            self.inputs.iter().map(|xi| (-sq_dist(x, xi) / two_l2).exp()),
        );
        let mean = k.dot(&self.alpha);
        let v = self.chol.l_dirty().solve_lower_triangular(&k).expect("non-singular factor");
        (mean, 1.0 - v.norm_squared())
    }

    /// `(μ, σ)` at a normalized input; `σ²` is clamped at zero.
    pub fn posterior(&self, x: &[f64]) -> Result<(f64, f64)> {
        self.check_dim(x)?;
        let (m, v) = self.standardized(x);
        Ok((self.y_mean + self.y_std * m, self.y_std * v.max(0.0).sqrt()))
    }

    /// Posterior variance before clamping, in original units.
    pub fn raw_variance(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        Ok(self.y_std * self.y_std * self.standardized(x).1)
    }

    /// Posteriors at `(head, t)` for every `t` in `tails`, where `head` holds
    /// all coordinates but the last.
    ///
    /// The RBF kernel factorizes over coordinates, so the cross-covariance
    /// vector is `a ∘ b_t` with `a` shared across the row; grouping training
    /// points by their last coordinate reduces each variance to a quadratic
    /// form over the groups.
    pub fn posterior_row(&self, head: &[f64], tails: &[f64]) -> Result<Vec<(f64, f64)>> {
        if head.len() + 1 != self.dim() {
            return Err(Error::domain(format!(
                "row head has dimension {}, model expects {}",
                head.len(),
                self.dim() - 1
            )));
        }
        let d = self.dim();
        let two_l2 = 2.0 * self.lengthscale * self.lengthscale;
        let a: Vec<f64> = self
            .inputs
            .iter()
            .map(|x| (-sq_dist(head, &x[..d - 1]) / two_l2).exp())
            .collect();
        let groups = &self.last_groups;
        let g = groups.len();
        let mut weighted_alpha = vec![0.0; g];
        let mut h = DMatrix::zeros(g, g);
        for (p, (_, members_p)) in groups.iter().enumerate() {
            weighted_alpha[p] = members_p.iter().map(|&i| a[i] * self.alpha[i]).sum();
            for (q, (_, members_q)) in groups.iter().enumerate().take(p + 1) {
                let mut s = 0.0;
                for &i in members_p {
                    let mut inner = 0.0;
                    for &j in members_q {
                        inner += self.k_inv[(i, j)] * a[j];
                    }
                    s += a[i] * inner;
                }
                h[(p, q)] = s;
                h[(q, p)] = s;
            }
        }
        let mut out = Vec::with_capacity(tails.len());
        let mut b = vec![0.0; g];
        for &t in tails {
            for (bp, (level, _)) in b.iter_mut().zip(groups) {
                *bp = (-(t - level) * (t - level) / two_l2).exp();
            }
            let mean: f64 = b.iter().zip(&weighted_alpha).map(|(x, y)| x * y).sum();
            let mut quad = 0.0;
            for p in 0..g {
                let mut row = 0.0;
                for q in 0..g {
                    row += h[(p, q)] * b[q];
                }
                quad += b[p] * row;
            }
            let var = (1.0 - quad).max(0.0);
            out.push((self.y_mean + self.y_std * mean, self.y_std * var.sqrt()));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixed(l: f64, e: f64) -> HyperparameterPolicy {
        HyperparameterPolicy::Fixed {
            lengthscale: l,
            noise_std: e,
        }
    }

    #[test]
    fn log_grids_hit_endpoints() {
        let g = log_grid(LENGTHSCALE_GRID);
        assert_eq!(g.len(), 16);
        assert_eq!((g[0], g[15]), (0.05, 1.0));
        assert!(g.windows(2).all(|p| p[1] > p[0]));
        assert_eq!(log_grid(NOISE_GRID).len(), 8);
    }

    #[test]
    fn zero_targets_give_zero_mean() {
        let x = vec![vec![0.1, 0.2], vec![0.5, 0.9], vec![0.7, 0.3]];
        let m = GpModel::fit(&x, &[0.0; 3], &HyperparameterPolicy::GridSearch).unwrap();
        for probe in [[0.0, 0.0], [0.3, 0.4], [5.0, -2.0]] {
            assert_eq!(m.posterior(&probe).unwrap().0, 0.0);
        }
    }

    #[test]
    fn duplicate_inputs_average() {
        let x = vec![vec![0.4], vec![0.4], vec![0.9]];
        let m = GpModel::fit(&x, &[1.0, 2.0, 0.0], &fixed(0.2, 0.1)).unwrap();
        let (mu, _) = m.posterior(&[0.4]).unwrap();
        assert!(mu > 1.0 && mu < 2.0, "{mu}");
    }

    #[test]
    fn row_matches_pointwise() {
        let x: Vec<Vec<f64>> = (0..12)
            .map(|i| vec![(i as f64 * 0.37).fract(), (i as f64 * 0.61).fract(), (i % 4) as f64 / 3.0])
            .collect();
        let y: Vec<f64> = x.iter().map(|v| (3.0 * v[0]).sin() + v[1] * v[2]).collect();
        let m = GpModel::fit(&x, &y, &fixed(0.3, 0.01)).unwrap();
        let tails = [0.0, 0.2, 1.0 / 3.0, 0.9];
        let row = m.posterior_row(&[0.25, 0.75], &tails).unwrap();
        for (&t, &(mu, sd)) in tails.iter().zip(&row) {
            let (pm, ps) = m.posterior(&[0.25, 0.75, t]).unwrap();
            assert!((mu - pm).abs() < 1e-9 && (sd - ps).abs() < 1e-7, "{mu} {pm} {sd} {ps}");
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(GpModel::fit(&[vec![0.0]], &[1.0], &HyperparameterPolicy::GridSearch).is_err());
        assert!(GpModel::fit(&[vec![0.0], vec![1.0]], &[1.0], &HyperparameterPolicy::GridSearch).is_err());
        assert!(GpModel::fit(&[vec![0.0], vec![1.0]], &[1.0, 2.0], &fixed(0.0, 0.1)).is_err());
        assert!(GpModel::fit(&[vec![0.0], vec![1.0]], &[1.0, 2.0], &fixed(0.1, 1e-9)).is_err());
        let m = GpModel::fit(&[vec![0.0], vec![1.0]], &[1.0, 2.0], &fixed(0.5, 0.1)).unwrap();
        assert!(m.posterior(&[0.0, 1.0]).is_err());
    }
}
