//! Gaussian-process surrogate over joint `(θ, ξ)` inputs with LCB and EI
//! acquisitions.

mod acquisition;
mod kernel;
mod model;
pub mod reference;

pub use acquisition::{ei, ei_value, ei_with_form, lcb, lcb_value, EiForm, DEFAULT_BETA};
pub use kernel::rbf_kernel;
pub use model::{
    GpModel, HyperparameterPolicy, InputScaling, Sample, LENGTHSCALE_GRID, NOISE_FLOOR, NOISE_GRID,
};
