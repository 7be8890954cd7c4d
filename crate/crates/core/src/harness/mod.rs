//! Experiment orchestration: shift sweeps, landscape scans and result files.

mod config;
mod export;
mod landscape;
mod sweep;

pub use config::{
    ExperimentConfig, GridSpec, PdfSpec, ProblemSpec, ShiftSeries, QAOA_BUDGET_PER_LAYER, VQE_BUDGET,
};
pub use export::{
    export_results, import_results, read_results_csv, read_shift_pdfs, results_header, weight_snapshots,
    write_landscape, write_results_csv, write_shift_pdfs, ExportFormat, WeightSnapshot, EVOLUTION_STEM,
    RESULTS_STEM, SHIFT_PDFS_FILE, WORST_CASE_STEM,
};
pub use landscape::{landscape_scan, Landscape};
pub use sweep::{
    metric_column, relative_change, relative_improvement, run_shift_sweep, CellTrace, ResultsRow, ResultsTable,
    SweepOutput, NOISELESS_LABEL,
};
