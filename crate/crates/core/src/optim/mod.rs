//! The distributionally robust BO loop, its three baselines, and the pieces
//! they share: Latin-hypercube initialization, multi-start outer search and
//! final-candidate selection.

mod config;
mod lhs;
mod outer;
mod run;
mod trace;

pub use config::{Method, OptimizerConfig, SelectionDirection};
pub use lhs::latin_hypercube;
pub use outer::{outer_minimize, OuterBudget, OuterResult};
pub use run::{run_optimizer, select_optimal, Objective, Surrogate};
pub use trace::{IterationRecord, OptimizationTrace};
