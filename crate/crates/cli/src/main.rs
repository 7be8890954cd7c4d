use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use drbo_core::dro::oracle::simplex_grid_maximum;
use drbo_core::dro::{solve_worst_case, DiscretePdf, MmdBall, NoiseGrid, DEFAULT_EPSILON, DEFAULT_GRID_MAX};
use drbo_core::gp::reference::dense_posterior;
use drbo_core::gp::{GpModel, HyperparameterPolicy};
use drbo_core::harness::*;
use drbo_core::optim::Method;
use drbo_core::problems::VqaProblem;
use drbo_core::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(name = "drbo", version, about = "Distributionally robust Bayesian optimization of VQA parameters")]
struct Cli {
    /// JSON experiment config; defaults to the 8-vertex QAOA sweep.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Replaces the replication seeds with this single seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Restricts the methods; repeat for several.
    #[arg(long, global = true)]
    method: Vec<String>,
    /// MMD ball radius.
    #[arg(long, global = true)]
    epsilon: Option<f64>,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for ExportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => ExportFormat::Csv,
            Format::Json => ExportFormat::Json,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Optimize under the reference pdf and evaluate under every shifted pdf.
    Sweep {
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Use the masked VQE problem when no config is given.
        #[arg(long)]
        vqe: bool,
    },
    /// Objective over the depth-1 QAOA parameter plane of the first problem.
    Landscape {
        #[arg(long, default_value_t = 64)]
        steps: usize,
        /// Noise levels to scan; repeat for several.
        #[arg(long, default_values_t = [0.0, 0.06])]
        xi: Vec<f64>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Compares the worst-case solver with lattice enumeration on the simplex.
    InnerSolverCheck {
        #[arg(long, default_value_t = 200)]
        instances: usize,
        #[arg(long, default_value_t = 5)]
        levels: usize,
        /// Lattice divisions per unit mass.
        #[arg(long, default_value_t = 50)]
        divisions: usize,
    },
    /// Compares GP posteriors with a dense LU solve.
    GpCheck {
        #[arg(long, default_value_t = 200)]
        points: usize,
        #[arg(long, default_value_t = 3)]
        dim: usize,
        #[arg(long, default_value_t = 50)]
        probes: usize,
    },
    /// Times the simulator, a GP fit and the inner solver.
    Bench {
        #[arg(long, default_value_t = 5)]
        repeats: usize,
    },
}

fn experiment(cli: &Cli, vqe: bool) -> Result<ExperimentConfig> {
    let mut config = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None if vqe => ExperimentConfig::vqe(),
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seeds = vec![seed];
    }
    if !cli.method.is_empty() {
        config.methods = cli.method.iter().map(|m| m.parse::<Method>()).collect::<Result<_>>()?;
    }
    if let Some(eps) = cli.epsilon {
        config.epsilon = eps;
    }
    if let Some(out) = &cli.out {
        config.output_dir = Some(out.clone());
    }
    config.validate()?;
    Ok(config)
}

fn sweep(cli: &Cli, format: Format, vqe: bool) -> Result<()> {
    let config = experiment(cli, vqe)?;
    let started = Instant::now();
    let out = run_shift_sweep(&config, cli.jobs)?;
    let mut labels: Vec<String> = config.methods.iter().map(|m| m.label().to_string()).collect();
    if out.table.rows.iter().any(|r| r.method == NOISELESS_LABEL) {
        labels.push(NOISELESS_LABEL.to_string());
    }
    println!("median expected metric per shift ({:.1}s)", started.elapsed().as_secs_f64());
    print!("{:>6} {:>9}", "shift", "mean");
    for l in &labels {
        print!(" {l:>10}");
    }
    println!();
    for (s, pdf) in out.shift_pdfs.iter().enumerate() {
        print!("{s:>6} {:>9.5}", pdf.mean(&out.grid));
        for l in &labels {
            print!(" {:>10.5}", out.table.median(l, s).unwrap_or(f64::NAN));
        }
        println!();
    }
    if let Some(dir) = &config.output_dir {
        let mut files = export_results(&out.table, &out.traces, dir, format.into())?;
        files.push(write_shift_pdfs(&out.shift_pdfs, &out.grid, dir)?);
        let cfg = dir.join("config.json");
        std::fs::write(&cfg, config.to_json()?).map_err(|e| Error::Io { path: cfg.clone(), source: e })?;
        files.push(cfg);
        for f in files {
            println!("wrote {}", f.display());
        }
    }
    Ok(())
}

fn landscape(cli: &Cli, steps: usize, xis: &[f64], format: Format) -> Result<()> {
    let config = experiment(cli, false)?;
    let (id, problem) = config
        .problem
        .build()?
        .into_iter()
        .next()
        .ok_or_else(|| Error::Config("problem spec produced no instance".into()))?;
    let scans = xis
        .iter()
        .map(|&xi| landscape_scan(&problem, (steps, steps), xi))
        .collect::<Result<Vec<_>>>()?;
    for s in &scans {
        let (i, j) = s.argmin;
        println!(
            "{id} xi={}: min {:.6} at gamma={:.5}, beta={:.5} (cell {i},{j})",
            s.xi, s.min, s.gammas[i], s.betas[j]
        );
    }
    for pair in scans.windows(2) {
        println!("argmin moved {} cells from xi={} to xi={}", pair[0].argmin_distance(&pair[1]), pair[0].xi, pair[1].xi);
    }
    if let Some(dir) = &config.output_dir {
        let ext = ExportFormat::from(format).extension();
        for s in &scans {
            let path = dir.join(format!("landscape_{id}_xi{}.{ext}", s.xi));
            write_landscape(s, &path, format.into())?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn random_simplex(rng: &mut ChaCha8Rng, n: usize) -> Result<DiscretePdf> {
    let masses: Vec<f64> = (0..n).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
    DiscretePdf::from_masses(&masses)
}

fn inner_solver_check(cli: &Cli, instances: usize, levels: usize, divisions: usize) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed.unwrap_or(0));
    let grid = NoiseGrid::uniform(levels, 0.0, DEFAULT_GRID_MAX)?;
    let eps = cli.epsilon.unwrap_or(DEFAULT_EPSILON);
    let (mut gap, mut excess, mut infeas) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..instances {
        let ball = MmdBall::with_default_kernel(&grid, random_simplex(&mut rng, levels)?, eps)?;
        let values: Vec<f64> = (0..levels).map(|_| rng.random::<f64>()).collect();
        let out = solve_worst_case(&values, &ball)?;
        let u = out.pdf.weights();
        infeas = infeas
            .max((u.iter().sum::<f64>() - 1.0).abs())
            .max(ball.distance_from_center(u)? - eps);
        let (_, lattice) = simplex_grid_maximum(&values, &ball, divisions)?;
        gap = gap.max((out.value - lattice).abs());
        excess = excess.max(lattice - out.value);
    }
    println!("instances {instances}, levels {levels}, lattice step {}", 1.0 / divisions as f64);
    println!("max |solver - lattice| {gap:.3e}");
    println!("max lattice value above solver {excess:.3e}");
    println!("max infeasibility {infeas:.3e}");
    if excess > 1e-9 || infeas > 1e-9 {
        return Err(Error::Numerical("solver is infeasible or beaten by the lattice".into()));
    }
    Ok(())
}

fn gp_check(cli: &Cli, points: usize, dim: usize, probes: usize) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed.unwrap_or(0));
    let x: Vec<Vec<f64>> = (0..points).map(|_| (0..dim).map(|_| rng.random::<f64>()).collect()).collect();
    let y: Vec<f64> = x.iter().map(|v| v.iter().map(|t| (3.0 * t).sin()).sum::<f64>() + 0.05 * rng.random::<f64>()).collect();
    let model = GpModel::fit(&x, &y, &HyperparameterPolicy::GridSearch)?;
    let (mut dm, mut dv) = (0.0f64, 0.0f64);
    for _ in 0..probes {
        let p: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
        let (mu, sd) = model.posterior(&p)?;
        let (rm, rs) = dense_posterior(&model, &p)?;
        dm = dm.max((mu - rm).abs());
        dv = dv.max((sd * sd - rs * rs).abs());
    }
    println!(
        "points {points}, dim {dim}: lengthscale {:.4}, noise std {:.2e}",
        model.lengthscale(),
        model.noise_std()
    );
    println!("max mean deviation {dm:.3e}, max variance deviation {dv:.3e}");
    if dm > 1e-8 || dv > 1e-8 {
        return Err(Error::Numerical("posterior disagrees with the dense solve".into()));
    }
    Ok(())
}

fn time<T>(label: &str, repeats: usize, mut f: impl FnMut() -> Result<T>) -> Result<()> {
    f()?;
    let t = Instant::now();
    for _ in 0..repeats {
        f()?;
    }
    println!("{label:<32} {:>10.3} ms", 1e3 * t.elapsed().as_secs_f64() / repeats.max(1) as f64);
    Ok(())
}

fn bench(repeats: usize) -> Result<()> {
    let graph = drbo_core::problems::Graph::random_regular_set(8, 3, 1, 0)?.remove(0);
    let problem = VqaProblem::qaoa_maxcut(graph, 1)?;
    time("qaoa n=8 p=1 noisy evaluation", repeats, || problem.evaluate(&[0.6, 0.4], 0.04))?;
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let x: Vec<Vec<f64>> = (0..120).map(|_| (0..3).map(|_| rng.random::<f64>()).collect()).collect();
    let y: Vec<f64> = x.iter().map(|v| v[0].sin() + v[1] * v[2]).collect();
    time("gp grid-search fit, 120 points", repeats, || GpModel::fit(&x, &y, &HyperparameterPolicy::GridSearch))?;
    let grid = NoiseGrid::default();
    let ball = MmdBall::with_default_kernel(&grid, random_simplex(&mut rng, 20)?, DEFAULT_EPSILON)?;
    let values: Vec<f64> = (0..20).map(|_| rng.random::<f64>()).collect();
    time("worst-case solve, 20 levels", repeats * 100, || solve_worst_case(&values, &ball))?;
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Sweep { format, vqe } => sweep(cli, *format, *vqe),
        Command::Landscape { steps, xi, format } => landscape(cli, *steps, xi, *format),
        Command::InnerSolverCheck {
            instances,
            levels,
            divisions,
        } => inner_solver_check(cli, *instances, *levels, *divisions),
        Command::GpCheck { points, dim, probes } => gp_check(cli, *points, *dim, *probes),
        Command::Bench { repeats } => bench(*repeats),
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Domain(_) => 2,
        _ if e.is_numerical() => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

