use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ampc::controller::SimConfig;
use ampc::harness::{self, load_config};
use ampc::Error;

#[derive(Parser)]
#[command(
    name = "ampc",
    version,
    about = "Adaptive MPC simulator for a knife-edge robot"
)]
struct Cli {
    /// Only print errors.
    #[arg(long, short, global = true, conflicts_with = "verbose")]
    quiet: bool,
    /// Print per-run progress.
    #[arg(long, short, global = true)]
    verbose: bool,
    /// Accepted for interface stability; runs are deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Config file; omitted keys take the reference-scenario defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Run one closed loop and write traces, figures and a summary.
    Simulate(RunArgs),
    /// Run the adaptive and full-knowledge loops and compare them.
    Compare(RunArgs),
    /// Replay the estimator over a recorded trajectory CSV.
    Identify {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Supplies the initial estimate and the sampling interval.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Solve one finite-horizon problem from the config's initial state.
    Cftoc(RunArgs),
}

fn config(path: Option<&Path>) -> Result<SimConfig, Error> {
    match path {
        Some(p) => load_config(p),
        None => Ok(SimConfig::default()),
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Simulate(a) => {
            let art = harness::run_simulate(&config(a.config.as_deref())?, &a.out)?;
            let s = &art.summary;
            if !cli.quiet {
                println!(
                    "final position error {:.4} m, heading error {:.4} rad, total cost {:.4}, {:.2} s",
                    s.final_position_error, s.final_heading_error, s.total_cost, s.wall_clock_s
                );
            }
        }
        Command::Compare(a) => {
            let art = harness::run_compare(&config(a.config.as_deref())?, &a.out)?;
            let s = &art.summary;
            if !cli.quiet {
                println!(
                    "final position error: adaptive {:.4} m, full knowledge {:.4} m; max input deviation {:.3e}",
                    s.adaptive_final_position_error,
                    s.full_knowledge_final_position_error,
                    s.max_input_deviation
                );
            }
        }
        Command::Identify {
            trace,
            out,
            config: cfg,
        } => {
            let cfg = config(cfg.as_deref())?;
            let art = harness::run_identify(&trace, &cfg.estimator, cfg.dt, &out)?;
            if !cli.quiet {
                let th = art.summary.final_estimate;
                println!(
                    "{} transitions; alpha_v {:.6} beta_v {:.6} alpha_w {:.6} beta_w {:.6}",
                    art.summary.transitions, th.alpha_v, th.beta_v, th.alpha_w, th.beta_w
                );
            }
        }
        Command::Cftoc(a) => {
            let art = harness::run_cftoc(&config(a.config.as_deref())?, &a.out)?;
            if !cli.quiet {
                let s = &art.summary;
                println!(
                    "cost {:.6} after {} iterations (converged: {})",
                    s.cost, s.iterations, s.converged
                );
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.quiet {
        log::LevelFilter::Error
    } else if cli.verbose {
        log::LevelFilter::Info
    } else {
        log::LevelFilter::Warn
    };
    env_logger::Builder::new().filter_level(level).init();
    if cli.seed.is_some() {
        log::info!("--seed has no effect: simulations are deterministic");
    }

    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
