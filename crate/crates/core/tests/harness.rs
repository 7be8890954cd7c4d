use std::f64::consts::PI;

use drbo_core::dro::*;
use drbo_core::harness::*;
use drbo_core::optim::{Method, OptimizerConfig, OuterBudget};
use drbo_core::problems::{Graph, HeaVqeSpec, VqaProblem};

fn edge_file(dir: &std::path::Path) -> std::path::PathBuf {
    let path = dir.join("edge.txt");
    std::fs::write(&path, Graph::new(2, [(0, 1)]).unwrap().to_edge_list()).unwrap();
    path
}

fn small_sweep(dir: &std::path::Path) -> ExperimentConfig {
    ExperimentConfig {
        problem: ProblemSpec::QaoaMaxCut {
            n_vertices: 6,
            degree: 3,
            depth: 1,
            graph_count: 2,
            graph_seed: 3,
            edge_lists: Vec::new(),
        },
        shifts: ShiftSeries {
            count: 3,
            ..ShiftSeries::default()
        },
        optimizer: Some(OptimizerConfig {
            init_count: 5,
            max_iterations: 3,
            batch_size: 2,
            outer: OuterBudget {
                restarts: 4,
                evaluations_per_start: 30,
            },
            ..OptimizerConfig::default()
        }),
        seeds: vec![0, 1],
        output_dir: Some(dir.to_path_buf()),
        ..ExperimentConfig::default()
    }
}

#[test]
fn sweep_rows_are_dot_products_and_files_are_stable() {
    let tmp = tempfile::tempdir().unwrap();
    let config = small_sweep(tmp.path());
    let out = run_shift_sweep(&config, 2).unwrap();
    // methods × shifts × seeds × graphs
    assert_eq!(out.table.rows.len(), 4 * 3 * 2 * 2);
    assert_eq!(out.traces.len(), 4 * 2 * 2);
    assert_eq!(out.shift_pdfs[0], out.reference);
    for r in &out.table.rows {
        let w = out.shift_pdfs[r.shift_index].weights();
        let dot: f64 = w.iter().zip(&r.metric_xi).map(|(a, b)| a * b).sum();
        assert!((dot - r.metric_expected).abs() <= 1e-12);
        assert_eq!(r.eval_mean, out.shift_pdfs[r.shift_index].mean(&out.grid));
        assert!(r.metric_xi.iter().all(|&m| (0.0..=1.0 + 1e-12).contains(&m)));
    }

    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    let again = run_shift_sweep(&config, 1).unwrap();
    let files_a = export_results(&out.table, &out.traces, &a, ExportFormat::Csv).unwrap();
    let files_b = export_results(&again.table, &again.traces, &b, ExportFormat::Csv).unwrap();
    for (fa, fb) in files_a.iter().zip(&files_b) {
        assert_eq!(std::fs::read(fa).unwrap(), std::fs::read(fb).unwrap(), "{}", fa.display());
    }
    assert_eq!(import_results(&files_a[0]).unwrap(), out.table);

    // Re-derive the expected metric from the exported files alone.
    let pdfs = read_shift_pdfs(&write_shift_pdfs(&out.shift_pdfs, &out.grid, &a).unwrap()).unwrap();
    for r in import_results(&files_a[0]).unwrap().rows {
        let dot: f64 = pdfs[r.shift_index].iter().zip(&r.metric_xi).map(|(a, b)| a * b).sum();
        assert!((dot - r.metric_expected).abs() <= 1e-12);
    }

    let json = export_results(&out.table, &out.traces, &tmp.path().join("j"), ExportFormat::Json).unwrap();
    assert_eq!(import_results(&json[0]).unwrap(), out.table);
}

#[test]
fn empty_table_is_header_only() {
    let tmp = tempfile::tempdir().unwrap();
    let files = export_results(&ResultsTable::new(20), &[], tmp.path(), ExportFormat::Csv).unwrap();
    let text = std::fs::read_to_string(&files[0]).unwrap();
    let mut expected = String::from("method,problem_id,seed,shift_index,eval_mean,metric_expected");
    for i in 0..20 {
        expected.push_str(&format!(",metric_xi_{i:02}"));
    }
    assert_eq!(text, expected + "\n");
    assert_eq!(import_results(&files[0]).unwrap(), ResultsTable::new(20));
}

#[test]
fn awkward_floats_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let values = [0.1 + 0.2, 1e-300, -5e-324, 1.0 / 3.0, 123456789.123456789, -0.0];
    let table = ResultsTable {
        n_levels: values.len(),
        rows: vec![ResultsRow {
            method: "BO-LCB".into(),
            problem_id: "g,0".into(),
            seed: u64::MAX,
            shift_index: 4,
            eval_mean: 0.030000000000000002,
            metric_expected: f64::MIN_POSITIVE,
            metric_xi: values.to_vec(),
        }],
    };
    let path = tmp.path().join("t.csv");
    write_results_csv(&table, &path).unwrap();
    let back = read_results_csv(&path).unwrap();
    assert_eq!(back, table);
    for (a, b) in back.rows[0].metric_xi.iter().zip(&values) {
        assert_eq!(a.to_bits(), b.to_bits());
    }
}

#[test]
fn dirac_evaluation_picks_one_level() {
    let grid = NoiseGrid::default();
    let problem = VqaProblem::qaoa_maxcut(Graph::cycle(4).unwrap(), 1).unwrap();
    let theta = [0.7, 0.3];
    let col = metric_column(&problem, &theta, &grid).unwrap();
    for j in [0, 7, 19] {
        let d = DiscretePdf::dirac(20, j).unwrap();
        assert_eq!(d.dot(&col), problem.metric(&theta, grid.levels()[j]).unwrap());
    }
}

#[test]
fn single_edge_reaches_high_ratio_with_every_method() {
    let tmp = tempfile::tempdir().unwrap();
    let config = ExperimentConfig {
        problem: ProblemSpec::QaoaMaxCut {
            n_vertices: 2,
            degree: 1,
            depth: 1,
            graph_count: 1,
            graph_seed: 0,
            edge_lists: vec![edge_file(tmp.path())],
        },
        seeds: vec![0],
        ..ExperimentConfig::default()
    };
    let out = run_shift_sweep(&config, 0).unwrap();
    for m in Method::ALL {
        let r = out.table.select(m.label(), 0).next().unwrap();
        assert!(r.metric_expected >= 0.9, "{m}: {}", r.metric_expected);
    }
}

#[test]
fn relative_improvement_cases() {
    assert_eq!(relative_change(-5.0, -4.0).unwrap(), 0.25);
    assert!(relative_change(1.0, 1e-13).is_err());

    let spec = HeaVqeSpec {
        restarts: 3,
        ..HeaVqeSpec::default()
    };
    let problem = VqaProblem::hea_vqe(&spec).unwrap();
    let grid = NoiseGrid::default();
    let pdf = truncated_gaussian_pdf(0.03, 0.01, &grid).unwrap();
    let theta0 = problem.noiseless_reference().unwrap();
    assert_eq!(relative_improvement(&theta0, &theta0, &pdf, &problem, &grid).unwrap(), 0.0);

    // Hand-summed expectations, level by level.
    let theta: Vec<f64> = theta0.iter().map(|t| t * 0.9).collect();
    let (mut e, mut e0) = (0.0, 0.0);
    for (i, &xi) in grid.levels().iter().enumerate() {
        e += pdf.weights()[i] * problem.energy(&theta, xi).unwrap();
        e0 += pdf.weights()[i] * problem.energy(&theta0, xi).unwrap();
    }
    let got = relative_improvement(&theta, &theta0, &pdf, &problem, &grid).unwrap();
    assert!((got - (e - e0) / e0).abs() < 1e-12);
    assert!(relative_improvement(&theta, &theta0, &DiscretePdf::uniform(3).unwrap(), &problem, &grid).is_err());
}

#[test]
fn landscape_cases() {
    let edge = VqaProblem::qaoa_maxcut(Graph::new(2, [(0, 1)]).unwrap(), 1).unwrap();
    let clean = landscape_scan(&edge, (64, 64), 0.0).unwrap();
    assert!((clean.min + 1.0).abs() < 1e-6, "{}", clean.min);
    assert_eq!(clean.values.len(), 64);
    assert_eq!(clean.gammas[32], PI / 2.0);
    assert!(clean.gammas.iter().all(|&g| g < PI));

    let damped = landscape_scan(&edge, (8, 8), 1.0).unwrap();
    let first = damped.values[0][0];
    assert!(damped.values.iter().flatten().all(|&v| (v - first).abs() < 1e-12));

    let deep = VqaProblem::qaoa_maxcut(Graph::cycle(4).unwrap(), 2).unwrap();
    assert!(landscape_scan(&deep, (4, 4), 0.0).is_err());

    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("sub/land.csv");
    write_landscape(&damped, &path, ExportFormat::Csv).unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap().lines().count(), 65);
}

#[test]
fn failed_sweep_reports_config_errors() {
    let mut config = ExperimentConfig::default();
    config.grid.levels = 0;
    assert!(matches!(run_shift_sweep(&config, 0), Err(drbo_core::Error::Config(_))));
    let config = ExperimentConfig {
        problem: ProblemSpec::QaoaMaxCut {
            n_vertices: 2,
            degree: 1,
            depth: 1,
            graph_count: 1,
            graph_seed: 0,
            edge_lists: vec!["/nonexistent/edges.txt".into()],
        },
        ..ExperimentConfig::default()
    };
    assert!(matches!(run_shift_sweep(&config, 0), Err(drbo_core::Error::Io { .. })));
}
