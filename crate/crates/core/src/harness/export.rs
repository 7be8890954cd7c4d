use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::landscape::Landscape;
use super::sweep::{CellTrace, ResultsRow, ResultsTable};
use crate::dro::{DiscretePdf, NoiseGrid};
use crate::error::{Error, Result};

pub const RESULTS_STEM: &str = "results";
pub const EVOLUTION_STEM: &str = "evolution";
pub const WORST_CASE_STEM: &str = "worst_case";
pub const SHIFT_PDFS_FILE: &str = "shift_pdfs.csv";

const FIXED_COLUMNS: [&str; 6] = [
    "method",
    "problem_id",
    "seed",
    "shift_index",
    "eval_mean",
    "metric_expected",
];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExportFormat {
    #[default]
    Csv,
    Json,
}

impl ExportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ExportFormat::Csv => "csv",
            ExportFormat::Json => "json",
        }
    }
}

impl FromStr for ExportFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ExportFormat::Csv),
            "json" => Ok(ExportFormat::Json),
            _ => Err(Error::Config(format!("unknown export format '{s}'"))),
        }
    }
}

/// One worst-case (or method weighting) snapshot per iteration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightSnapshot {
    pub method: String,
    pub problem_id: String,
    pub seed: u64,
    pub iteration: usize,
    pub weights: Vec<f64>,
}

pub fn results_header(n_levels: usize) -> Vec<String> {
    FIXED_COLUMNS
        .iter()
        .map(|s| s.to_string())
        .chain((0..n_levels).map(|i| format!("metric_xi_{i:02}")))
        .collect()
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Serialization(format!("{}: {other:?}", path.display())),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    Ok(csv::WriterBuilder::new().flexible(true).from_writer(create(path)?))
}

fn write_json<T: Serialize + ?Sized>(value: &T, path: &Path) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| Error::Serialization(e.to_string()))?;
    w.write_all(b"\n").and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let r = BufReader::new(File::open(path).map_err(|e| Error::io(path, e))?);
    serde_json::from_reader(r).map_err(|e| Error::Serialization(format!("{}: {e}", path.display())))
}

/// Shortest decimal text that parses back to the same `f64`.
fn num(x: f64) -> String {
    format!("{x}")
}

pub fn write_results_csv(table: &ResultsTable, path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(results_header(table.n_levels)).map_err(|e| csv_err(path, e))?;
    for r in &table.rows {
        if r.metric_xi.len() != table.n_levels {
            return Err(Error::Internal(format!(
                "row has {} metric columns, table has {}",
                r.metric_xi.len(),
                table.n_levels
            )));
        }
        let mut rec = vec![
            r.method.clone(),
            r.problem_id.clone(),
            r.seed.to_string(),
            r.shift_index.to_string(),
            num(r.eval_mean),
            num(r.metric_expected),
        ];
        rec.extend(r.metric_xi.iter().map(|&x| num(x)));
        w.write_record(&rec).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_results_csv(path: &Path) -> Result<ResultsTable> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = csv::Reader::from_reader(BufReader::new(file));
    let header = r.headers().map_err(|e| csv_err(path, e))?.clone();
    let n_levels = header.len().saturating_sub(FIXED_COLUMNS.len());
    if header.iter().map(str::to_string).collect::<Vec<_>>() != results_header(n_levels) {
        return Err(Error::Serialization(format!("{}: unexpected header", path.display())));
    }
    let bad = |what: &str| Error::Serialization(format!("{}: bad {what}", path.display()));
    let mut table = ResultsTable::new(n_levels);
    for rec in r.records() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let f = |i: usize| rec[i].parse::<f64>().map_err(|_| bad("number"));
        table.rows.push(ResultsRow {
            method: rec[0].to_string(),
            problem_id: rec[1].to_string(),
            seed: rec[2].parse().map_err(|_| bad("seed"))?,
            shift_index: rec[3].parse().map_err(|_| bad("shift index"))?,
            eval_mean: f(4)?,
            metric_expected: f(5)?,
            metric_xi: (FIXED_COLUMNS.len()..rec.len()).map(f).collect::<Result<_>>()?,
        });
    }
    Ok(table)
}

/// Reads a table written by [`export_results`], choosing the parser from the
/// file extension.
pub fn import_results(path: &Path) -> Result<ResultsTable> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => read_json(path),
        _ => read_results_csv(path),
    }
}

pub fn weight_snapshots(traces: &[CellTrace]) -> Vec<WeightSnapshot> {
    traces
        .iter()
        .flat_map(|c| {
            c.trace.records.iter().map(move |r| WeightSnapshot {
                method: c.method.label().to_string(),
                problem_id: c.problem_id.clone(),
                seed: c.seed,
                iteration: r.iteration,
                weights: r.weights.clone(),
            })
        })
        .collect()
}

fn write_evolution_csv(traces: &[CellTrace], path: &Path) -> Result<()> {
    let dim = traces
        .iter()
        .flat_map(|c| c.trace.records.iter().map(|r| r.theta.len()))
        .max()
        .unwrap_or(0);
    let mut w = csv_writer(path)?;
    let mut header: Vec<String> = [
        "method",
        "problem_id",
        "seed",
        "iteration",
        "score",
        "weighted_lcb",
        "nominal_lcb",
        "lengthscale",
        "noise_std",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    header.extend((0..dim).map(|k| format!("theta_{k}")));
    w.write_record(&header).map_err(|e| csv_err(path, e))?;
    for c in traces {
        for r in &c.trace.records {
            let mut rec = vec![
                c.method.label().to_string(),
                c.problem_id.clone(),
                c.seed.to_string(),
                r.iteration.to_string(),
                num(r.score),
                num(r.weighted_lcb),
                num(r.nominal_lcb),
                num(r.lengthscale),
                num(r.noise_std),
            ];
            rec.extend(r.theta.iter().map(|&x| num(x)));
            w.write_record(&rec).map_err(|e| csv_err(path, e))?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn write_snapshots_csv(snaps: &[WeightSnapshot], n_levels: usize, path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    let mut header: Vec<String> = ["method", "problem_id", "seed", "iteration"].iter().map(|s| s.to_string()).collect();
    header.extend((0..n_levels).map(|i| format!("w_{i:02}")));
    w.write_record(&header).map_err(|e| csv_err(path, e))?;
    for s in snaps {
        let mut rec = vec![s.method.clone(), s.problem_id.clone(), s.seed.to_string(), s.iteration.to_string()];
        rec.extend(s.weights.iter().map(|&x| num(x)));
        w.write_record(&rec).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Writes the results table, per-iteration evolution series and weight
/// snapshots into `dir`, returning the paths in that order.
pub fn export_results(table: &ResultsTable, traces: &[CellTrace], dir: &Path, format: ExportFormat) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let ext = format.extension();
    let results = dir.join(format!("{RESULTS_STEM}.{ext}"));
    let evolution = dir.join(format!("{EVOLUTION_STEM}.{ext}"));
    let worst = dir.join(format!("{WORST_CASE_STEM}.{ext}"));
    let snaps = weight_snapshots(traces);
    match format {
        ExportFormat::Csv => {
            write_results_csv(table, &results)?;
            write_evolution_csv(traces, &evolution)?;
            write_snapshots_csv(&snaps, table.n_levels, &worst)?;
        }
        ExportFormat::Json => {
            write_json(table, &results)?;
            write_json(traces, &evolution)?;
            write_json(&snaps, &worst)?;
        }
    }
    Ok(vec![results, evolution, worst])
}

/// `shift_index,mean,w_00..` for every evaluation pdf.
pub fn write_shift_pdfs(shifts: &[DiscretePdf], grid: &NoiseGrid, dir: &Path) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join(SHIFT_PDFS_FILE);
    let mut w = csv_writer(&path)?;
    let mut header: Vec<String> = vec!["shift_index".into(), "mean".into()];
    header.extend((0..grid.len()).map(|i| format!("w_{i:02}")));
    w.write_record(&header).map_err(|e| csv_err(&path, e))?;
    for (s, pdf) in shifts.iter().enumerate() {
        let mut rec = vec![s.to_string(), num(pdf.mean(grid))];
        rec.extend(pdf.weights().iter().map(|&x| num(x)));
        w.write_record(&rec).map_err(|e| csv_err(&path, e))?;
    }
    w.flush().map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

pub fn read_shift_pdfs(path: &Path) -> Result<Vec<Vec<f64>>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = csv::Reader::from_reader(BufReader::new(file));
    r.records()
        .map(|rec| {
            let rec = rec.map_err(|e| csv_err(path, e))?;
            (2..rec.len())
                .map(|i| rec[i].parse::<f64>().map_err(|_| Error::Serialization(format!("{}: bad number", path.display()))))
                .collect()
        })
        .collect()
}

/// Long-format `gamma,beta,value` rows in row-major order.
pub fn write_landscape(landscape: &Landscape, path: &Path, format: ExportFormat) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    if format == ExportFormat::Json {
        return write_json(landscape, path);
    }
    let mut w = csv_writer(path)?;
    w.write_record(["gamma", "beta", "value"]).map_err(|e| csv_err(path, e))?;
    for (g, row) in landscape.gammas.iter().zip(&landscape.values) {
        for (b, v) in landscape.betas.iter().zip(row) {
            w.write_record([num(*g), num(*b), num(*v)]).map_err(|e| csv_err(path, e))?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}
