use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dro::{truncated_gaussian_pdf, DiscretePdf, NoiseGrid, DEFAULT_EPSILON, DEFAULT_GRID_MAX, DEFAULT_GRID_SIZE};
use crate::error::{Error, Result};
use crate::optim::{Method, OptimizerConfig};
use crate::problems::{Boundary, Graph, HeaVqeSpec, VqaProblem};

/// Budget `M = T` per QAOA layer.
pub const QAOA_BUDGET_PER_LAYER: usize = 20;
/// Budget `M = T` for the masked VQE problem.
pub const VQE_BUDGET: usize = 40;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemSpec {
    /// Random regular graphs, or the graphs in `edge_lists` when non-empty.
    QaoaMaxCut {
        #[serde(default = "default_vertices")]
        n_vertices: usize,
        #[serde(default = "default_degree")]
        degree: usize,
        #[serde(default = "default_depth")]
        depth: usize,
        #[serde(default = "default_graph_count")]
        graph_count: usize,
        #[serde(default)]
        graph_seed: u64,
        #[serde(default)]
        edge_lists: Vec<PathBuf>,
    },
    HeaVqe {
        #[serde(default = "default_spins")]
        n_spins: usize,
        #[serde(default = "default_coupling")]
        coupling: f64,
        #[serde(default = "default_field")]
        field: f64,
        #[serde(default = "default_layers")]
        layers: usize,
        #[serde(default)]
        boundary: Boundary,
        #[serde(default = "default_restarts")]
        restarts: usize,
        #[serde(default)]
        seed: u64,
    },
}

fn default_vertices() -> usize {
    8
}
fn default_degree() -> usize {
    3
}
fn default_depth() -> usize {
    1
}
fn default_graph_count() -> usize {
    5
}
fn default_spins() -> usize {
    HeaVqeSpec::default().n_spins
}
fn default_coupling() -> f64 {
    HeaVqeSpec::default().coupling
}
fn default_field() -> f64 {
    HeaVqeSpec::default().field
}
fn default_layers() -> usize {
    HeaVqeSpec::default().layers
}
fn default_restarts() -> usize {
    HeaVqeSpec::default().restarts
}

impl Default for ProblemSpec {
    fn default() -> Self {
        ProblemSpec::QaoaMaxCut {
            n_vertices: default_vertices(),
            degree: default_degree(),
            depth: default_depth(),
            graph_count: default_graph_count(),
            graph_seed: 0,
            edge_lists: Vec::new(),
        }
    }
}

impl ProblemSpec {
    /// Instances with their identifiers, in a fixed order.
    pub fn build(&self) -> Result<Vec<(String, VqaProblem)>> {
        match self {
            ProblemSpec::QaoaMaxCut {
                n_vertices,
                degree,
                depth,
                graph_count,
                graph_seed,
                edge_lists,
            } => {
                if *depth == 0 {
                    return Err(Error::Config("QAOA depth must be >= 1".into()));
                }
                let graphs = if edge_lists.is_empty() {
                    Graph::random_regular_set(*n_vertices, *degree, *graph_count, *graph_seed)?
                } else {
                    edge_lists.iter().map(|p| Graph::read_edge_list(p)).collect::<Result<_>>()?
                };
                graphs
                    .into_iter()
                    .enumerate()
                    .map(|(i, g)| Ok((format!("g{i}"), VqaProblem::qaoa_maxcut(g, *depth)?)))
                    .collect()
            }
            ProblemSpec::HeaVqe { .. } => {
                let spec = self.hea_spec().expect("variant checked");
                Ok(vec![(format!("heisenberg{}", spec.n_spins), VqaProblem::hea_vqe(&spec)?)])
            }
        }
    }

    /// `M = T` budget used when the config does not set one.
    pub fn default_budget(&self) -> usize {
        match self {
            ProblemSpec::QaoaMaxCut { depth, .. } => QAOA_BUDGET_PER_LAYER * depth,
            ProblemSpec::HeaVqe { .. } => VQE_BUDGET,
        }
    }

    pub fn from_hea(spec: &HeaVqeSpec) -> Self {
        ProblemSpec::HeaVqe {
            n_spins: spec.n_spins,
            coupling: spec.coupling,
            field: spec.field,
            layers: spec.layers,
            boundary: spec.boundary,
            restarts: spec.restarts,
            seed: spec.seed,
        }
    }

    pub fn hea_spec(&self) -> Option<HeaVqeSpec> {
        match *self {
            ProblemSpec::HeaVqe {
                n_spins,
                coupling,
                field,
                layers,
                boundary,
                restarts,
                seed,
            } => Some(HeaVqeSpec {
                n_spins,
                coupling,
                field,
                layers,
                boundary,
                restarts,
                seed,
            }),
            ProblemSpec::QaoaMaxCut { .. } => None,
        }
    }
}

/// Uniform grid on `[min, max]` inclusive.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSpec {
    pub levels: usize,
    pub min: f64,
    pub max: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            levels: DEFAULT_GRID_SIZE,
            min: 0.0,
            max: DEFAULT_GRID_MAX,
        }
    }
}

impl GridSpec {
    pub fn build(&self) -> Result<NoiseGrid> {
        NoiseGrid::uniform(self.levels, self.min, self.max)
    }
}

/// Truncated Gaussian on the grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PdfSpec {
    pub mean: f64,
    pub std: f64,
}

impl Default for PdfSpec {
    fn default() -> Self {
        PdfSpec { mean: -0.01, std: 0.01 }
    }
}

impl PdfSpec {
    pub fn build(&self, grid: &NoiseGrid) -> Result<DiscretePdf> {
        truncated_gaussian_pdf(self.mean, self.std, grid)
    }
}

/// Evaluation pdfs: Gaussians with a common std and means either listed in
/// `means` or `start + k·step` for `k < count`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ShiftSeries {
    pub means: Option<Vec<f64>>,
    pub start: f64,
    pub step: f64,
    pub count: usize,
    pub std: f64,
}

impl Default for ShiftSeries {
    fn default() -> Self {
        ShiftSeries {
            means: None,
            start: -0.01,
            step: 0.01,
            count: 9,
            std: 0.01,
        }
    }
}

impl ShiftSeries {
    pub fn means(&self) -> Vec<f64> {
        match &self.means {
            Some(m) => m.clone(),
            None => (0..self.count).map(|k| self.start + k as f64 * self.step).collect(),
        }
    }

    pub fn build(&self, grid: &NoiseGrid) -> Result<Vec<DiscretePdf>> {
        self.means().into_iter().map(|m| truncated_gaussian_pdf(m, self.std, grid)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub problem: ProblemSpec,
    pub grid: GridSpec,
    pub reference: PdfSpec,
    pub shifts: ShiftSeries,
    pub epsilon: f64,
    pub methods: Vec<Method>,
    /// Shared optimizer settings; `method`, `seed` and `epsilon` are set per
    /// cell. `None` uses the defaults with `M = T` from the problem.
    pub optimizer: Option<OptimizerConfig>,
    pub seeds: Vec<u64>,
    pub output_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            problem: ProblemSpec::default(),
            grid: GridSpec::default(),
            reference: PdfSpec::default(),
            shifts: ShiftSeries::default(),
            epsilon: DEFAULT_EPSILON,
            methods: Method::ALL.to_vec(),
            optimizer: None,
            seeds: vec![0, 1, 2],
            output_dir: None,
        }
    }
}

impl ExperimentConfig {
    /// The 4-spin masked VQE experiment.
    pub fn vqe() -> Self {
        ExperimentConfig {
            problem: ProblemSpec::from_hea(&HeaVqeSpec::default()),
            ..Default::default()
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.shifts.means.as_ref().map_or(self.shifts.count == 0, |m| m.is_empty()) {
            return Err(Error::Config("shift series is empty".into()));
        }
        if !(self.shifts.std > 0.0) {
            return Err(Error::Config("shift std must be positive".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::Config("no method enabled".into()));
        }
        if self.seeds.is_empty() {
            return Err(Error::Config("no replication seed".into()));
        }
        if !(self.epsilon >= 0.0) || !self.epsilon.is_finite() {
            return Err(Error::Config(format!("epsilon must be finite and >= 0, got {}", self.epsilon)));
        }
        let grid = self.grid.build().map_err(as_config)?;
        self.reference.build(&grid).map_err(as_config)?;
        self.shifts.build(&grid).map_err(as_config)?;
        self.optimizer_for(self.methods[0], self.seeds[0]).validate()
    }

    /// Optimizer settings for one cell.
    pub fn optimizer_for(&self, method: Method, seed: u64) -> OptimizerConfig {
        let budget = self.problem.default_budget();
        let base = self.optimizer.clone().unwrap_or(OptimizerConfig {
            init_count: budget,
            max_iterations: budget,
            ..OptimizerConfig::default()
        });
        OptimizerConfig {
            method,
            seed,
            epsilon: self.epsilon,
            ..base
        }
    }
}

fn as_config(e: Error) -> Error {
    match e {
        Error::Domain(m) => Error::Config(m),
        other => other,
    }
}
