pub mod dro;
pub mod error;
pub mod gp;
pub mod harness;
pub mod optim;
pub mod problems;
pub mod sim;

pub use error::{Error, Result};
