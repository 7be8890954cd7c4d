use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::export::{export_results, write_shift_pdfs, ExportFormat};
use crate::dro::{DiscretePdf, NoiseGrid};
use crate::error::{Error, Result};
use crate::optim::{run_optimizer, Method, OptimizationTrace};
use crate::problems::VqaProblem;

/// Method label for rows evaluating a problem's noiseless reference
/// parameters.
pub const NOISELESS_LABEL: &str = "noiseless";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultsRow {
    pub method: String,
    pub problem_id: String,
    pub seed: u64,
    pub shift_index: usize,
    /// Mean noise level of the evaluation pdf.
    pub eval_mean: f64,
    /// `⟨w_s, metric_xi⟩`.
    pub metric_expected: f64,
    /// Metric at every grid level.
    pub metric_xi: Vec<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ResultsTable {
    pub n_levels: usize,
    pub rows: Vec<ResultsRow>,
}

impl ResultsTable {
    pub fn new(n_levels: usize) -> Self {
        ResultsTable {
            n_levels,
            rows: Vec::new(),
        }
    }

    /// Rows for one method and shift index, in table order.
    pub fn select<'a>(&'a self, method: &'a str, shift_index: usize) -> impl Iterator<Item = &'a ResultsRow> + 'a {
        self.rows
            .iter()
            .filter(move |r| r.method == method && r.shift_index == shift_index)
    }

    /// Median of `metric_expected` over the selected rows.
    pub fn median(&self, method: &str, shift_index: usize) -> Option<f64> {
        let mut v: Vec<f64> = self.select(method, shift_index).map(|r| r.metric_expected).collect();
        if v.is_empty() {
            return None;
        }
        v.sort_by(f64::total_cmp);
        let n = v.len();
        Some(if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) })
    }

    pub fn max_shift_index(&self) -> Option<usize> {
        self.rows.iter().map(|r| r.shift_index).max()
    }
}

/// One optimizer run of the sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellTrace {
    pub method: Method,
    pub problem_id: String,
    pub seed: u64,
    pub trace: OptimizationTrace,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepOutput {
    pub grid: NoiseGrid,
    pub reference: DiscretePdf,
    pub shift_pdfs: Vec<DiscretePdf>,
    pub table: ResultsTable,
    pub traces: Vec<CellTrace>,
}

/// Metric of `theta` at every grid level.
pub fn metric_column(problem: &VqaProblem, theta: &[f64], grid: &NoiseGrid) -> Result<Vec<f64>> {
    grid.levels().par_iter().map(|&xi| problem.metric(theta, xi)).collect()
}

fn rows_for(
    method: &str,
    problem_id: &str,
    seed: u64,
    column: &[f64],
    grid: &NoiseGrid,
    shifts: &[DiscretePdf],
) -> Vec<ResultsRow> {
    shifts
        .iter()
        .enumerate()
        .map(|(s, pdf)| ResultsRow {
            method: method.to_string(),
            problem_id: problem_id.to_string(),
            seed,
            shift_index: s,
            eval_mean: pdf.mean(grid),
            metric_expected: pdf.dot(column),
            metric_xi: column.to_vec(),
        })
        .collect()
}

/// Optimizes every (problem, method, seed) cell under the reference pdf and
/// evaluates the result exactly under each shifted pdf. `jobs = 0` uses the
/// global thread pool. Problems with a noiseless reference also get rows
/// labelled [`NOISELESS_LABEL`] with seed 0.
pub fn run_shift_sweep(config: &ExperimentConfig, jobs: usize) -> Result<SweepOutput> {
    config.validate()?;
    let grid = config.grid.build()?;
    let reference = config.reference.build(&grid)?;
    let shifts = config.shifts.build(&grid)?;
    let problems = config.problem.build()?;

    let mut cells = Vec::new();
    for (p, _) in problems.iter().enumerate() {
        for &method in &config.methods {
            for &seed in &config.seeds {
                cells.push((p, method, seed));
            }
        }
    }

    let run_cell = |&(p, method, seed): &(usize, Method, u64)| -> Result<(Vec<ResultsRow>, CellTrace)> {
        let (id, problem) = &problems[p];
        let opt = config.optimizer_for(method, seed);
        let (theta, trace) = run_optimizer(problem, &reference, &grid, &opt)?;
        let column = metric_column(problem, &theta, &grid)?;
        let rows = rows_for(method.label(), id, seed, &column, &grid, &shifts);
        let cell = CellTrace {
            method,
            problem_id: id.clone(),
            seed,
            trace,
        };
        Ok((rows, cell))
    };
    let run_all = || -> (Vec<Result<(Vec<ResultsRow>, CellTrace)>>, Vec<Result<Vec<ResultsRow>>>) {
        let results = cells.par_iter().map(run_cell).collect();
        let noiseless = problems
            .par_iter()
            .filter_map(|(id, problem)| {
                problem.noiseless_reference().map(|theta| {
                    metric_column(problem, &theta, &grid)
                        .map(|c| rows_for(NOISELESS_LABEL, id, 0, &c, &grid, &shifts))
                })
            })
            .collect();
        (results, noiseless)
    };
    let (results, noiseless) = if jobs == 0 {
        run_all()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::Config(format!("cannot build thread pool: {e}")))?
            .install(run_all)
    };

    let mut table = ResultsTable::new(grid.len());
    let mut traces = Vec::new();
    let mut failure = None;
    for r in results {
        match r {
            Ok((rows, cell)) => {
                table.rows.extend(rows);
                traces.push(cell);
            }
            Err(e) => {
                if let Error::Aborted { partial, .. } = &e {
                    log::warn!("cell aborted after {} iterations", partial.records.len());
                }
                failure.get_or_insert(e);
            }
        }
    }
    for r in noiseless {
        match r {
            Ok(rows) => table.rows.extend(rows),
            Err(e) => {
                failure.get_or_insert(e);
            }
        }
    }
    if let Some(e) = failure {
        if let Some(dir) = &config.output_dir {
            export_results(&table, &traces, dir, ExportFormat::Csv)?;
            write_shift_pdfs(&shifts, &grid, dir)?;
        }
        return Err(e);
    }
    Ok(SweepOutput {
        grid,
        reference,
        shift_pdfs: shifts,
        table,
        traces,
    })
}

/// `(E[f(θ, ξ)] − E[f(θ₀, ξ)]) / E[f(θ₀, ξ)]` with exact grid expectations;
/// positive values mean `θ` has the lower energy.
pub fn relative_improvement(
    theta: &[f64],
    theta0: &[f64],
    pdf: &DiscretePdf,
    problem: &VqaProblem,
    grid: &NoiseGrid,
) -> Result<f64> {
    if pdf.len() != grid.len() {
        return Err(Error::domain("pdf and grid sizes differ"));
    }
    let expect = |t: &[f64]| -> Result<f64> {
        let col: Vec<f64> = grid.levels().par_iter().map(|&xi| problem.evaluate(t, xi)).collect::<Result<_>>()?;
        Ok(pdf.dot(&col))
    };
    relative_change(expect(theta)?, expect(theta0)?)
}

/// `(e − e0) / e0`, refusing a vanishing denominator.
pub fn relative_change(e: f64, e0: f64) -> Result<f64> {
    if e0.abs() <= 1e-12 {
        return Err(Error::domain(format!("reference expectation {e0} is too close to zero")));
    }
    Ok((e - e0) / e0)
}
