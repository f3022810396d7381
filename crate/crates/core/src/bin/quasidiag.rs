use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use quasidiag::assembly::Space;
use quasidiag::experiment::{run_experiment_with, ExperimentConfig, RefineMode};
use quasidiag::Error;

/// Condition numbers of quasi-diagonally preconditioned and diagonally
/// scaled discrete dual-norm matrices over a sequence of refined meshes.
#[derive(Parser, Debug)]
#[command(version)]
struct Cli {
    /// Spatial dimension (2, 3 or 4).
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Polynomial degree of the trial space (0 or 1).
    #[arg(long, default_value_t = 0)]
    degree: usize,
    /// Dual norm: `hm1` (dual of H^1_0) or `tilde` (dual of H^1).
    #[arg(long, default_value = "hm1")]
    space: String,
    /// `uniform` or `adaptive` (2D only).
    #[arg(long, default_value = "uniform")]
    refine: String,
    /// Number of meshes, counting the initial one.
    #[arg(long, default_value_t = 4)]
    levels: usize,
    /// Rank-one weight of the tilde preconditioners [default: 0.01, 0.1 in 4D].
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, default_value_t = 0.1)]
    beta: f64,
    /// Dörfler bulk parameter for adaptive refinement.
    #[arg(long, default_value_t = 0.25)]
    theta: f64,
    /// Relative Rayleigh quotient change that stops the eigenvalue iterations.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value_t = 2000)]
    max_iter: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV output; rows are also printed to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write I, D, C and D^(p) of every level as Matrix Market files here.
    #[arg(long)]
    dump_matrices: Option<PathBuf>,
    /// Write 0 in the seconds column.
    #[arg(long)]
    no_timing: bool,
}

fn config(cli: Cli) -> Result<ExperimentConfig, Error> {
    let mut cfg = ExperimentConfig::new(cli.dim);
    cfg.degree = cli.degree;
    cfg.space = cli.space.parse::<Space>()?;
    cfg.refine = cli.refine.parse::<RefineMode>()?;
    cfg.levels = cli.levels;
    if let Some(a) = cli.alpha {
        cfg.alpha = a;
    }
    cfg.beta = cli.beta;
    cfg.theta = cli.theta;
    cfg.tol = cli.tol;
    cfg.max_iter = cli.max_iter;
    cfg.seed = cli.seed;
    cfg.out = cli.out;
    cfg.dump_matrices = cli.dump_matrices;
    cfg.record_timing = !cli.no_timing;
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match config(cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    println!("{}", quasidiag::experiment::CSV_HEADER);
    let result = run_experiment_with(&cfg, |row| {
        println!("{}", quasidiag::experiment::format_row(row));
    });
    match result {
        Ok(_) => ExitCode::SUCCESS,
        Err(e @ (Error::InvalidConfig(_) | Error::UnsupportedDimension(_))) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
