use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use rhoscope::run::{cmd_optics, cmd_plan, cmd_reconstruct, cmd_simulate, cmd_sweep};
use rhoscope::run::{ExperimentConfig, Overrides};
use rhoscope::{Error, Result};

/// Density-operator reconstruction from simple projector measurements.
#[derive(Parser)]
#[command(name = "rhoscope", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Experiment configuration file (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Master seed; overrides the config seed (which overrides TOMO_SEED).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory; overrides the config out_dir.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Ignore the shot block and use exact expectation values.
    #[arg(long, global = true)]
    exact: bool,

    /// For optics runs: also verify that shifted probe pairs reconstruct
    /// the same band, and emit probe_shift.csv.
    #[arg(long, global = true)]
    check_probe_shift: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the measurement plan for the configured scheme.
    Plan,
    /// Simulate (exact or finite-shot) expectation values for the plan.
    Simulate,
    /// Reconstruct the density matrix from simulated expectation values.
    Reconstruct,
    /// Run the full beam-splitter/photon-counting pipeline.
    Optics,
    /// Repeat noisy reconstructions across shot levels and tabulate errors.
    Sweep,
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| Error::ConfigInvalid("--config PATH is required".into()))?;
    let overrides = Overrides {
        seed: cli.seed,
        out: cli.out.clone(),
        exact: cli.exact,
        check_probe_shift: cli.check_probe_shift,
    };
    ExperimentConfig::from_path(path)?.resolve(&overrides)
}

fn run(cli: &Cli) -> Result<()> {
    let cfg = load_config(cli)?;
    match cli.command {
        Command::Plan => {
            let (plan, path) = cmd_plan(&cfg)?;
            println!("{} projectors -> {}", plan.len(), path.display());
        }
        Command::Simulate => {
            let (data, path) = cmd_simulate(&cfg)?;
            println!(
                "{} expectation values -> {}",
                data.records().len(),
                path.display()
            );
        }
        Command::Reconstruct => {
            let report = cmd_reconstruct(&cfg)?;
            match &report.metrics {
                Some(m) => println!(
                    "scheme {}: fidelity {:.6e}, trace distance {:.6e}",
                    report.scheme, m.fidelity, m.trace_distance
                ),
                None => println!("scheme {}: reconstruction written", report.scheme),
            }
        }
        Command::Optics => {
            let report = cmd_optics(&cfg, cli.check_probe_shift)?;
            match &report.metrics {
                Some(m) => println!(
                    "optics: fidelity {:.6e}, trace distance {:.6e}",
                    m.fidelity, m.trace_distance
                ),
                None => println!("optics: reconstruction written"),
            }
            if let Some(d) = report.probe_shift_max_discrepancy {
                println!("probe-shift max discrepancy {d:.3e}");
            }
        }
        Command::Sweep => {
            let (rows, path) = cmd_sweep(&cfg)?;
            for row in &rows {
                println!(
                    "shots {:>10}: mean trace distance {:.6e}",
                    row.level, row.mean_trace_distance
                );
            }
            println!("-> {}", path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
