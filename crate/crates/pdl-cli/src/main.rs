use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use pdl_cli::jobs::{self, EvolveSpec, Solver, SweepSpec};
use pdl_cli::{compare, config, worker_count, CliError};

/// Single-photon scattering in a 1D multimode cavity: excitation dynamics,
/// field intensities, and wave-delay observables.
#[derive(Parser)]
#[command(name = "pdl", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Time series of the amplitudes, probabilities, and field intensities.
    Evolve {
        #[arg(long)]
        config: PathBuf,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "analytic")]
        solver: Solver,
        /// Worker count (default: PDL_DEFAULT_JOBS, then all cores).
        #[arg(long)]
        jobs: Option<usize>,
        /// Evaluate closed forms beyond their truncation validity windows.
        #[arg(long)]
        allow_truncated: bool,
        /// Samples over [0, t_end].
        #[arg(long, default_value_t = 376)]
        t_points: usize,
        /// Write the full mode vectors to a binary sidecar.
        #[arg(long)]
        save_modes: bool,
        /// Fixed-step RK4 with this step instead of the adaptive integrator.
        #[arg(long)]
        fixed_step: Option<f64>,
    },
    /// Delay observables over a detuning grid (units of γ₂).
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
        /// Lower grid bound, δ/γ₂.
        #[arg(long, default_value_t = -3.0, allow_hyphen_values = true)]
        delta_min: f64,
        /// Upper grid bound, δ/γ₂.
        #[arg(long, default_value_t = 3.0, allow_hyphen_values = true)]
        delta_max: f64,
        #[arg(long, default_value_t = 121)]
        points: usize,
        /// Add normalized columns δ/γ₂ and Δt·γ₂.
        #[arg(long)]
        normalized: bool,
    },
    /// Machine-readable pass/fail summary of the invariant suite.
    Compare {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Regenerate the three canned figure datasets shipped in-repo.
    Figures {
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Evolve {
            config,
            out,
            solver,
            jobs: _,
            allow_truncated,
            t_points,
            save_modes,
            fixed_step,
        } => {
            let config = jobs::load_job_config(&config)?;
            let written = jobs::run_evolve(&EvolveSpec {
                config,
                out_dir: out,
                solver,
                t_points,
                allow_truncated,
                save_modes,
                fixed_step,
            })?;
            for path in written {
                println!("wrote {}", path.display());
            }
            Ok(())
        }
        Command::Sweep {
            config,
            out,
            jobs: jobs_flag,
            delta_min,
            delta_max,
            points,
            normalized,
        } => {
            let config = jobs::load_job_config(&config)?;
            let path = jobs::run_sweep(&SweepSpec {
                config,
                out_dir: out,
                ratio_min: delta_min,
                ratio_max: delta_max,
                points,
                jobs: worker_count(jobs_flag),
                normalized,
            })?;
            println!("wrote {}", path.display());
            Ok(())
        }
        Command::Compare { config, out, jobs: _ } => {
            let config = config::load_config(&config)?;
            let path = compare::run_compare(&config, &out)?;
            println!("wrote {}", path.display());
            Ok(())
        }
        Command::Figures { out, jobs } => {
            let written = jobs::run_figures(&out, worker_count(jobs))?;
            for path in written {
                println!("wrote {}", path.display());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
