//! Fixtures shared by the benchmarks, built deterministically from fixed
//! seeds.

use drbo_core::dro::{DiscretePdf, MmdBall, NoiseGrid, DEFAULT_EPSILON};
use drbo_core::problems::{Graph, VqaProblem};
use drbo_core::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Depth-`p` QAOA on the first seeded 3-regular graph with `n` vertices.
pub fn qaoa_problem(n: usize, depth: usize) -> Result<VqaProblem> {
    let graph = Graph::random_regular_set(n, 3, 1, 0)?.remove(0);
    VqaProblem::qaoa_maxcut(graph, depth)
}

/// `n` points in the unit cube with a smooth target plus small noise.
pub fn gp_dataset(n: usize, dim: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let x: Vec<Vec<f64>> = (0..n).map(|_| (0..dim).map(|_| rng.random::<f64>()).collect()).collect();
    let y = x
        .iter()
        .map(|v| v.iter().map(|t| (3.0 * t).sin()).sum::<f64>() + 0.01 * rng.random::<f64>())
        .collect();
    (x, y)
}

/// Default-kernel ball around a random center on the default grid, and a
/// value row to maximize over it.
pub fn worst_case_instance() -> Result<(MmdBall, Vec<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let grid = NoiseGrid::default();
    let masses: Vec<f64> = (0..grid.len()).map(|_| rng.random::<f64>() + 0.01).collect();
    let ball = MmdBall::with_default_kernel(&grid, DiscretePdf::from_masses(&masses)?, DEFAULT_EPSILON)?;
    let values = (0..grid.len()).map(|_| rng.random::<f64>()).collect();
    Ok((ball, values))
}
