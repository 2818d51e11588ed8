//! Command-line driver: run, check, scenarios, materials, audit.
//!
//! Exit codes: 0 success, 2 configuration error, 3 solver failure,
//! 4 invariant violation.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use eplast_core::config::{parse_config, serialize};
use eplast_core::driver::{exit_code_for, recompute_reports, run_scenario};
use eplast_core::error::SimError;

#[derive(Parser)]
#[command(
    name = "eplast",
    about = "Eulerian finite-strain thermoplasticity simulator on a structured grid",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured scenario and write CSV, snapshots and manifest.
    Run {
        /// Configuration file (line-oriented key = value); empty/absent
        /// means the static scenario with defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory (overrides [output] dir).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the number of steps.
        #[arg(long)]
        steps: Option<usize>,
        /// Override the time step.
        #[arg(long)]
        dt: Option<f64>,
        /// Worker threads for data-parallel kernels (0 = automatic).
        #[arg(long, default_value_t = 0)]
        threads: usize,
        /// Override the random seed for initial perturbations.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Validate a configuration file and print the resolved settings.
    Check {
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// List the scenario presets.
    Scenarios,
    /// List material presets, or describe one by name.
    Materials { name: Option<String> },
    /// Recompute the energy report from stored snapshots.
    Audit {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Run directory holding fields/ snapshots.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
}

fn load_config(path: &Option<PathBuf>) -> Result<(eplast_core::SolverConfig, Vec<String>), SimError> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p)?,
        None => String::new(),
    };
    parse_config(&text)
}

fn init_threads(threads: usize) {
    if threads > 0 {
        // ignore the error if a pool already exists (e.g. in tests)
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
}

fn real_main() -> Result<(), SimError> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            config,
            out,
            steps,
            dt,
            threads,
            seed,
        } => {
            init_threads(threads);
            let (mut cfg, warnings) = load_config(&config)?;
            if let Some(steps) = steps {
                cfg.n_steps = steps;
            }
            if let Some(dt) = dt {
                cfg.dt = dt;
            }
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            if let Some(out) = out {
                cfg.out_dir = out.to_string_lossy().to_string();
            }
            for w in &warnings {
                eprintln!("warning: {w}");
            }
            let out_dir = PathBuf::from(&cfg.out_dir);
            let artifacts = run_scenario(&cfg, &out_dir)?;
            let last = artifacts.reports.last().expect("at least the initial report");
            let max_mech = artifacts
                .reports
                .iter()
                .fold(0.0f64, |m, r| m.max(r.mech_residual_rel));
            let max_total = artifacts
                .reports
                .iter()
                .fold(0.0f64, |m, r| m.max(r.total_residual_rel));
            println!(
                "completed {} steps of '{}' (t = {})",
                cfg.n_steps, cfg.scenario, last.t
            );
            println!(
                "final energies: kinetic {:.6e}  stored {:.6e}  hardening {:.6e}  heat {:.6e}",
                last.kinetic, last.stored, last.hardening, last.heat
            );
            println!(
                "max residual ratios: mechanical {:.3e}  total {:.3e}",
                max_mech, max_total
            );
            println!(
                "max |det Fp - 1| pre-renormalization: {:.3e}",
                artifacts.max_pre_renorm_det_dev
            );
            println!("artifacts in {}", artifacts.out_dir.display());
            Ok(())
        }
        Command::Check { config } => {
            let (cfg, warnings) = load_config(&config)?;
            for w in &warnings {
                eprintln!("warning: {w}");
            }
            print!("{}", serialize(&cfg));
            eprintln!("configuration OK");
            Ok(())
        }
        Command::Scenarios => {
            for name in eplast_core::scenario::scenario_names() {
                println!("{}", eplast_core::scenario::describe_scenario(name)?);
            }
            Ok(())
        }
        Command::Materials { name } => {
            match name {
                Some(name) => println!("{}", eplast_core::constitutive::describe_material(&name)?),
                None => {
                    for name in eplast_core::constitutive::material_preset_names() {
                        println!("{name}");
                    }
                }
            }
            Ok(())
        }
        Command::Audit {
            config,
            out,
            threads,
        } => {
            init_threads(threads);
            let (cfg, _) = load_config(&config)?;
            let reports = recompute_reports(&cfg, &out)?;
            let path = out.join("energies_recomputed.csv");
            let mut text = String::from(eplast_core::audit::CSV_HEADER);
            text.push('\n');
            for r in &reports {
                text.push_str(&eplast_core::audit::csv_row(r));
                text.push('\n');
            }
            std::fs::write(&path, text)?;
            println!(
                "recomputed {} report rows from snapshots -> {}",
                reports.len(),
                path.display()
            );
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match real_main() {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err) as u8)
        }
    }
}
