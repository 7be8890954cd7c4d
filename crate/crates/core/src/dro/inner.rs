//! Worst-case distribution over the MMD ball intersected with the simplex.
//!
//! Maximizes `⟨u, v⟩` subject to `u ≥ 0`, `Σu = 1`, `(u − w)ᵀM(u − w) ≤ ε²`
//! with a primal active-set method. For a fixed set `Z` of coordinates pinned
//! at zero the problem over the free set `F` is a linear objective on an
//! ellipsoid slice and has a closed-form maximizer; the outer loop walks
//! toward that maximizer, pins any coordinate that hits zero on the way, and
//! releases pinned coordinates whose multiplier is negative.

use nalgebra::{DMatrix, DVector};

use super::grid::DiscretePdf;
use super::mmd::MmdBall;
use crate::error::{Error, Result};

/// Feasibility slack on both constraints after polishing.
pub const FEASIBILITY_TOL: f64 = 1e-9;

const ITERATIONS_PER_DIM: usize = 50;

/// Solver output with the KKT multipliers of the final active set.
///
/// For any `ν` and `μ ≥ 0`, weak duality gives
/// `⟨u, v⟩ ≤ ⟨w, v + μ⟩ + ε·‖v − ν1 + μ‖_{M⁻¹}` for every feasible `u`; the
/// multipliers here make that bound tight at the returned point.
#[derive(Clone, Debug, PartialEq)]
pub struct WorstCase {
    pub pdf: DiscretePdf,
    pub value: f64,
    /// Multiplier `ν` of the sum constraint.
    pub sum_multiplier: f64,
    /// Multipliers `μ_i ≥ 0` of `u_i ≥ 0`.
    pub nonnegativity_multipliers: Vec<f64>,
    pub iterations: usize,
}

/// The adversarial pdf `argmax_{w′ ∈ ball} ⟨w′, values⟩`.
pub fn worst_case_distribution(values: &[f64], ball: &MmdBall) -> Result<DiscretePdf> {
    Ok(solve_worst_case(values, ball)?.pdf)
}

pub fn solve_worst_case(values: &[f64], ball: &MmdBall) -> Result<WorstCase> {
    let n = ball.dim();
    if values.len() != n {
        return Err(Error::domain(format!("{} values for a ball of dimension {n}", values.len())));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("worst-case values must be finite"));
    }
    let w = ball.center().weights();
    let eps = ball.radius();
    let (vmin, vmax) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));

    if eps == 0.0 || vmax == vmin {
        let pdf = ball.center().clone();
        return Ok(WorstCase {
            value: pdf.dot(values),
            pdf,
            sum_multiplier: vmax,
            nonnegativity_multipliers: vec![0.0; n],
            iterations: 0,
        });
    }

    // The best vertex is optimal over the whole simplex.
    let top = argmax_first(values);
    let mut vertex = vec![0.0; n];
    vertex[top] = 1.0;
    if ball.distance_from_center(&vertex)? <= eps {
        let mu = values.iter().map(|v| vmax - v).collect();
        return finish(values, ball, vertex, vmax, mu, 0);
    }

    let m = ball.jittered_kernel();
    let span = vmax - vmin;
    let mut u = w.to_vec();
    let mut pinned: Vec<bool> = w.iter().map(|&x| x == 0.0).collect();
    let mut nu = vmax;
    let mut mu = vec![0.0; n];
    let max_iter = ITERATIONS_PER_DIM * n;
    let mut iterations = 0;
    let mut converged = false;

    while iterations < max_iter {
        iterations += 1;
        let target = restricted_maximizer(values, w, eps, m, &pinned, span)?;
        let mut alpha = 1.0;
        let mut blocking = None;
        for i in 0..n {
            if pinned[i] {
                continue;
            }
            let d = target.u[i] - u[i];
            if d < 0.0 {
                let ratio = u[i] / -d;
                if ratio < alpha {
                    alpha = ratio;
                    blocking = Some(i);
                }
            }
        }
        for i in 0..n {
            if !pinned[i] {
                u[i] += alpha * (target.u[i] - u[i]);
            }
        }
        if let Some(b) = blocking {
            u[b] = 0.0;
            pinned[b] = true;
            continue;
        }
        u.copy_from_slice(&target.u);
        nu = target.nu;
        mu = target.mu;
        let release = (0..n)
            .filter(|&i| pinned[i] && mu[i] < -1e-12 * span)
            .min_by(|&a, &b| mu[a].total_cmp(&mu[b]));
        match release {
            Some(i) => pinned[i] = false,
            None => {
                converged = true;
                break;
            }
        }
    }
    if !converged {
        log::warn!("worst-case solver stopped after {iterations} iterations without a KKT point");
    }
    for x in &mut mu {
        *x = x.max(0.0);
    }
    finish(values, ball, u, nu, mu, iterations)
}

fn argmax_first(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

struct Restricted {
    u: Vec<f64>,
    nu: f64,
    mu: Vec<f64>,
}

/// Closed-form maximizer with the coordinates in `pinned` fixed at zero.
///
/// With `e = u − w`, `A = M_FF`, `b = M_FZ e_Z` and `r = A⁻¹b`, the free part
/// satisfies `1ᵀe_F = Σ_Z w` and `(e_F + r)ᵀA(e_F + r) ≤ ε² + rᵀb − e_ZᵀM_ZZe_Z`.
/// The maximizer is `e_F = t·g + κ·A⁻¹1 − r` with `g` the component of
/// `A⁻¹v_F` orthogonal to the sum constraint.
fn restricted_maximizer(
    values: &[f64],
    w: &[f64],
    eps: f64,
    m: &DMatrix<f64>,
    pinned: &[bool],
    span: f64,
) -> Result<Restricted> {
    let n = values.len();
    let free: Vec<usize> = (0..n).filter(|&i| !pinned[i]).collect();
    let zero: Vec<usize> = (0..n).filter(|&i| pinned[i]).collect();
    if free.is_empty() {
        return Err(Error::Solver {
            message: "every coordinate pinned at zero".into(),
            iterate: w.to_vec(),
        });
    }
    let a_mat = DMatrix::from_fn(free.len(), free.len(), |i, j| m[(free[i], free[j])]);
    let chol = a_mat.clone().cholesky().ok_or_else(|| Error::Solver {
        message: "free block of the kernel matrix is not positive definite".into(),
        iterate: w.to_vec(),
    })?;
    let e_z: Vec<f64> = zero.iter().map(|&i| -w[i]).collect();
    let b = DVector::from_fn(free.len(), |i, _| {
        zero.iter().zip(&e_z).map(|(&z, &e)| m[(free[i], z)] * e).sum()
    });
    let c: f64 = zero
        .iter()
        .zip(&e_z)
        .map(|(&i, &ei)| zero.iter().zip(&e_z).map(|(&j, &ej)| ei * m[(i, j)] * ej).sum::<f64>())
        .sum();
    let v_f = DVector::from_fn(free.len(), |i, _| values[free[i]]);
    let ones = DVector::from_element(free.len(), 1.0);
    let a = chol.solve(&v_f);
    let o = chol.solve(&ones);
    let r = chol.solve(&b);
    let s: f64 = zero.iter().map(|&i| w[i]).sum();
    let sum_o = o.sum();
    let kappa = (s + r.sum()) / sum_o;
    let nu0 = a.sum() / sum_o;
    let g = &a - &o * nu0;
    let q = g.dot(&v_f).max(0.0);
    let r2 = eps * eps + r.dot(&b) - c;
    let radial = (r2 - kappa * kappa * sum_o).max(0.0);
    let t = if q > 1e-24 * span * span * sum_o {
        (radial / q).sqrt()
    } else {
        0.0
    };
    let e_f = &g * t + &o * kappa - &r;

    let mut u = vec![0.0; n];
    for (k, &i) in free.iter().enumerate() {
        u[i] = w[i] + e_f[k];
    }
    let nu = if t > 0.0 { nu0 - kappa / t } else { nu0 };
    let mut mu = vec![0.0; n];
    for &z in &zero {
        mu[z] = if t > 0.0 {
            let me_z: f64 = (0..n).map(|j| m[(z, j)] * (u[j] - w[j])).sum();
            nu + me_z / t - values[z]
        } else {
            nu - values[z]
        };
    }
    Ok(Restricted { u, nu, mu })
}

/// Clamps, renormalizes and pulls the point back into the ball along the
/// segment to the center, then validates both constraints.
fn finish(
    values: &[f64],
    ball: &MmdBall,
    mut u: Vec<f64>,
    nu: f64,
    mu: Vec<f64>,
    iterations: usize,
) -> Result<WorstCase> {
    let w = ball.center().weights();
    for x in &mut u {
        *x = x.max(0.0);
    }
    let total: f64 = u.iter().sum();
    if !(total > 0.0) || !total.is_finite() {
        return Err(Error::Solver {
            message: "iterate left the simplex".into(),
            iterate: u,
        });
    }
    for x in &mut u {
        *x /= total;
    }
    let dist = ball.distance_from_center(&u)?;
    if dist > ball.radius() {
        let shrink = ball.radius() / dist;
        for (x, &c) in u.iter_mut().zip(w) {
            *x = c + shrink * (*x - c);
        }
    }
    let sum: f64 = u.iter().sum();
    let dist = ball.distance_from_center(&u)?;
    if (sum - 1.0).abs() > FEASIBILITY_TOL
        || u.iter().any(|&x| x < -FEASIBILITY_TOL)
        || dist > ball.radius() + FEASIBILITY_TOL
    {
        return Err(Error::Solver {
            message: format!("infeasible after polish: sum {sum}, distance {dist}"),
            iterate: u,
        });
    }
    // DiscretePdf demands [0, 1] and a 1e-12 sum; fix the last ulp drift.
    let pdf = DiscretePdf::from_masses(&u).map_err(|e| Error::Solver {
        message: e.to_string(),
        iterate: u.clone(),
    })?;
    let value = pdf.dot(values);
    Ok(WorstCase {
        pdf,
        value,
        sum_multiplier: nu,
        nonnegativity_multipliers: mu,
        iterations,
    })
}
