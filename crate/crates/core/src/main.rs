use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use rotamb::scenario::{self, ScenarioConfig};
use rotamb::{output, spectral, stability};

/// Stability analysis of consensus systems whose agents perceive positions
/// through rotated or reflected local frames.
#[derive(Parser)]
#[command(name = "rotamb", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the stability report for a scenario as JSON.
    Check { config: PathBuf },
    /// Print the spectrum of the negated ambiguous system matrix as CSV.
    Spectrum { config: PathBuf },
    /// Run the scenario's sweep and write the grid CSV.
    Sweep {
        config: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Run the scenario's simulation and write the trace CSV plus metadata.
    Simulate {
        config: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Re-run shipped scenarios; `reproduce all` regenerates every data set.
    Reproduce {
        target: String,
        #[arg(short, long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return ExitCode::from(if err.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(if err.is_numerical() { 2 } else { 1 })
        }
    }
}

fn run(cli: Cli) -> rotamb::Result<()> {
    match cli.command {
        Command::Check { config } => {
            let cfg = ScenarioConfig::from_path(&config)?;
            let report = stability::stability_check(
                &cfg.laplacian()?,
                &cfg.ambiguity_set()?,
                spectral::DEFAULT_TOL,
            )?;
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
        Command::Spectrum { config } => {
            let cfg = ScenarioConfig::from_path(&config)?;
            let report = stability::stability_check(
                &cfg.laplacian()?,
                &cfg.ambiguity_set()?,
                spectral::DEFAULT_TOL,
            )?;
            print!("{}", output::spectrum_csv(&report.spectrum));
        }
        Command::Sweep { config, out } => {
            let cfg = ScenarioConfig::from_path(&config)?;
            if cfg.sweep.is_none() {
                return Err(rotamb::Error::InvalidConfig(format!(
                    "{} declares no sweep",
                    cfg.name
                )));
            }
            let result = scenario::run_experiment(&cfg, &out)?;
            let grid = result.sweep.expect("sweep configured");
            eprintln!(
                "{}: sweep written ({} x {} cells, min {:.6}, max {:.6})",
                result.name,
                grid.axes[0].len(),
                grid.axes.get(1).map_or(1, Vec::len),
                grid.min_value(),
                grid.max_value(),
            );
        }
        Command::Simulate { config, out } => {
            let cfg = ScenarioConfig::from_path(&config)?;
            if cfg.simulation.is_none() {
                return Err(rotamb::Error::InvalidConfig(format!(
                    "{} declares no simulation",
                    cfg.name
                )));
            }
            let result = scenario::run_experiment(&cfg, &out)?;
            let trace = result.trace.expect("simulation configured");
            eprintln!(
                "{}: {:?} after {} samples (final error {:.3e})",
                result.name,
                trace.classification.expect("completed trace"),
                trace.times.len(),
                trace.errors.last().copied().unwrap_or(f64::NAN),
            );
        }
        Command::Reproduce { target, out } => {
            if target != "all" {
                return Err(rotamb::Error::InvalidConfig(format!(
                    "unknown reproduce target '{target}'; only 'all' is supported"
                )));
            }
            let results = scenario::reproduce_all(&out)?;
            for result in &results {
                eprintln!(
                    "{}: verdict {:?}, min_eig_gamma {:.6}",
                    result.name, result.report.verdict, result.report.min_eig_gamma
                );
            }
            eprintln!("{} scenarios written to {}", results.len(), out.display());
        }
    }
    Ok(())
}
