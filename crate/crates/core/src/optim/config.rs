use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::outer::OuterBudget;
use crate::dro::{DEFAULT_EPSILON, DEFAULT_LENGTHSCALE_FACTOR};
use crate::error::{Error, Result};
use crate::gp::{EiForm, HyperparameterPolicy, DEFAULT_BETA};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Drbo,
    BoLcb,
    BoEi,
    BoStable,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Drbo, Method::BoLcb, Method::BoEi, Method::BoStable];

    pub fn label(self) -> &'static str {
        match self {
            Method::Drbo => "DRBO",
            Method::BoLcb => "BO-LCB",
            Method::BoEi => "BO-EI",
            Method::BoStable => "BO-Stable",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace(['-', '_'], "");
        match key.as_str() {
            "drbo" => Ok(Method::Drbo),
            "bolcb" | "lcb" => Ok(Method::BoLcb),
            "boei" | "ei" => Ok(Method::BoEi),
            "bostable" | "stable" => Ok(Method::BoStable),
            _ => Err(Error::Config(format!("unknown method '{s}'"))),
        }
    }
}

/// Direction in which the final candidate is chosen from `⟨w, μ(θ, ·)⟩`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionDirection {
    #[default]
    Minimize,
    Maximize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizerConfig {
    pub method: Method,
    /// Initial Latin-hypercube sample count `M`.
    pub init_count: usize,
    /// Iterations `T`.
    pub max_iterations: usize,
    /// Noise levels sampled per iteration `K`.
    pub batch_size: usize,
    pub beta: f64,
    /// MMD ball radius; used by DRBO only.
    pub epsilon: f64,
    /// MMD kernel lengthscale; `None` means two grid spacings.
    pub mmd_lengthscale: Option<f64>,
    pub seed: u64,
    pub gp: HyperparameterPolicy,
    pub outer: OuterBudget,
    pub ei_form: EiForm,
    pub selection: SelectionDirection,
    /// Compass-search evaluations of the exact expected objective applied to
    /// the selected parameters; 0 disables the refinement.
    pub warm_start_evaluations: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            method: Method::Drbo,
            init_count: 20,
            max_iterations: 20,
            batch_size: 5,
            beta: DEFAULT_BETA,
            epsilon: DEFAULT_EPSILON,
            mmd_lengthscale: None,
            seed: 0,
            gp: HyperparameterPolicy::GridSearch,
            outer: OuterBudget::default(),
            ei_form: EiForm::Paper,
            selection: SelectionDirection::Minimize,
            warm_start_evaluations: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.init_count < 2 {
            return Err(Error::Config(format!("init_count must be >= 2, got {}", self.init_count)));
        }
        if self.max_iterations < 1 {
            return Err(Error::Config("max_iterations must be >= 1".into()));
        }
        if self.batch_size < 1 {
            return Err(Error::Config("batch_size must be >= 1".into()));
        }
        if !(self.beta >= 0.0) || !self.beta.is_finite() {
            return Err(Error::Config(format!("beta must be finite and >= 0, got {}", self.beta)));
        }
        if !(self.epsilon >= 0.0) || !self.epsilon.is_finite() {
            return Err(Error::Config(format!("epsilon must be finite and >= 0, got {}", self.epsilon)));
        }
        if let Some(l) = self.mmd_lengthscale {
            if !(l > 0.0) {
                return Err(Error::Config(format!("mmd_lengthscale must be positive, got {l}")));
            }
        }
        Ok(())
    }

    /// MMD kernel lengthscale for a grid with the given spacing.
    pub fn mmd_lengthscale_for(&self, spacing: f64) -> f64 {
        self.mmd_lengthscale.unwrap_or(if spacing > 0.0 {
            DEFAULT_LENGTHSCALE_FACTOR * spacing
        } else {
            1.0
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.label().parse::<Method>().unwrap(), m);
        }
        assert_eq!("bo_lcb".parse::<Method>().unwrap(), Method::BoLcb);
        assert!("sgd".parse::<Method>().is_err());
    }

    #[test]
    fn validation() {
        assert!(OptimizerConfig::default().validate().is_ok());
        let bad = OptimizerConfig { init_count: 1, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = OptimizerConfig { epsilon: -0.1, ..Default::default() };
        assert!(bad.validate().is_err());
        let parsed: OptimizerConfig = serde_json::from_str(r#"{"method": "bo_ei", "seed": 4}"#).unwrap();
        assert_eq!((parsed.method, parsed.seed, parsed.batch_size), (Method::BoEi, 4, 5));
        assert!(serde_json::from_str::<OptimizerConfig>(r#"{"bogus": 1}"#).is_err());
    }
}
