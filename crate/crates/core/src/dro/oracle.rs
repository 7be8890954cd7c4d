//! Brute-force reference for the worst-case distribution: enumerate every
//! point of the simplex lattice with spacing `1/divisions` and keep the best
//! one inside the ball.

use super::mmd::MmdBall;
use crate::error::{Error, Result};

/// Largest lattice the oracle will enumerate.
pub const MAX_LATTICE_POINTS: u64 = 50_000_000;

/// Number of lattice points `C(divisions + n − 1, n − 1)`.
pub fn lattice_size(n: usize, divisions: usize) -> u64 {
    let mut c: u64 = 1;
    for k in 1..n as u64 {
        c = c.saturating_mul(divisions as u64 + k) / k;
    }
    c
}

/// Best feasible lattice point and its objective. Ties keep the first point
/// in lexicographic enumeration order.
pub fn simplex_grid_maximum(values: &[f64], ball: &MmdBall, divisions: usize) -> Result<(Vec<f64>, f64)> {
    let n = ball.dim();
    if values.len() != n || n == 0 {
        return Err(Error::domain("values do not match the ball dimension"));
    }
    if divisions == 0 {
        return Err(Error::domain("lattice needs at least one division"));
    }
    if lattice_size(n, divisions) > MAX_LATTICE_POINTS {
        return Err(Error::Resource(format!(
            "simplex lattice with n = {n}, divisions = {divisions} is too large"
        )));
    }
    let m = ball.kernel();
    let w = ball.center().weights();
    let eps2 = ball.radius() * ball.radius();
    let h = 1.0 / divisions as f64;

    let mut counts = vec![0usize; n];
    let mut point = vec![0.0; n];
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut visit = |counts: &[usize]| {
        for (p, &c) in point.iter_mut().zip(counts) {
            *p = c as f64 * h;
        }
        let mut q = 0.0;
        for i in 0..n {
            let di = point[i] - w[i];
            for j in 0..n {
                q += di * m[(i, j)] * (point[j] - w[j]);
            }
        }
        if q <= eps2 {
            let value: f64 = point.iter().zip(values).map(|(p, v)| p * v).sum();
            if best.as_ref().map_or(true, |(_, b)| value > *b) {
                best = Some((point.clone(), value));
            }
        }
    };
    enumerate(&mut counts, 0, divisions, &mut visit);
    best.ok_or_else(|| Error::domain("no lattice point lies inside the ball; refine the lattice"))
}

fn enumerate(counts: &mut [usize], k: usize, remaining: usize, visit: &mut impl FnMut(&[usize])) {
    if k == counts.len() - 1 {
        counts[k] = remaining;
        visit(counts);
        return;
    }
    for c in 0..=remaining {
        counts[k] = c;
        enumerate(counts, k + 1, remaining - c, visit);
    }
}
