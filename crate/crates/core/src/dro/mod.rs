//! Discretized noise distributions, MMD geometry and the worst-case
//! distribution over an MMD ball.

mod grid;
mod inner;
mod mmd;
pub mod oracle;

pub use grid::{
    truncated_gaussian_pdf, DiscretePdf, NoiseGrid, DEFAULT_GRID_MAX, DEFAULT_GRID_SIZE,
    PDF_SUM_TOL,
};
pub use inner::{solve_worst_case, worst_case_distribution, WorstCase, FEASIBILITY_TOL};
pub use mmd::{
    mmd_distance, mmd_kernel_matrix, MmdBall, DEFAULT_EPSILON, DEFAULT_LENGTHSCALE_FACTOR,
};
