//! `lab`: run, validate, or enumerate the experiments of a configuration.
//! Exit codes: 0 success, 2 configuration error, 3 experiment failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use formlab::cli::{self, RunOptions};

#[derive(Parser)]
#[command(
    name = "lab",
    version,
    about = "Numerical laboratory for measure-perturbed Dirichlet forms",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every experiment in the configuration and write CSV tables.
    Run {
        /// TOML configuration file.
        config: PathBuf,
        /// Output directory (overrides LAB_OUTPUT_DIR and the config).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads for in-experiment sweeps (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
        /// Multiplier on every residual/step tolerance (> 1 loosens).
        #[arg(long = "tol-scale", default_value_t = 1.0)]
        tol_scale: f64,
    },
    /// Parse and cross-check a configuration, echoing the resolved form.
    Validate {
        /// TOML configuration file.
        config: PathBuf,
    },
    /// List the experiment names the runner recognizes.
    ListExperiments,
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run { config, out, threads, tol_scale } => {
            let cfg = match cli::parse_config(&config) {
                Ok(cfg) => cfg,
                Err(e) => {
                    eprintln!("lab: {e}");
                    return ExitCode::from(2);
                }
            };
            let opts = RunOptions { out_dir: out, threads, tol_scale };
            match cli::run(&cfg, &opts) {
                Ok(report) => {
                    for o in &report.outcomes {
                        match (&o.file, &o.error) {
                            (Some(f), _) => {
                                println!("ok      {f}  (rows: {}, {:.1} ms)", o.rows, o.wall_ms)
                            }
                            (None, Some(e)) => println!("error   {}: {e}", o.name),
                            (None, None) => unreachable!("outcome without file or error"),
                        }
                    }
                    println!("wrote {}", report.directory.join("manifest.toml").display());
                    if report.all_ok() {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(3)
                    }
                }
                Err(e) => {
                    eprintln!("lab: {e}");
                    ExitCode::from(3)
                }
            }
        }
        Command::Validate { config } => match cli::parse_config(&config) {
            Ok(cfg) => {
                print!("{}", cfg.echo());
                eprintln!("ok: {} experiments", cfg.experiments.len());
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("lab: {e}");
                ExitCode::from(2)
            }
        },
        Command::ListExperiments => {
            for (name, what) in cli::experiment_catalog() {
                println!("{name:<16}{what}");
            }
            ExitCode::SUCCESS
        }
    }
}
