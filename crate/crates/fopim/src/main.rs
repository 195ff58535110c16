//! Thin CLI over the experiment runners.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fopim::harness::{
    run_ber_experiment, run_bound_validation, run_crb_table, run_rate_table,
    run_rmse_experiment, ExperimentSpec, HarnessError, ResultTable, RunOptions,
};

#[derive(Parser)]
#[command(
    name = "fopim",
    version,
    about = "FDA-MIMO ISAC experiments: BER sweeps, sensing RMSE, rate tables, bound validation and estimation bounds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo BER sweep with the analytic bound column.
    Ber(RunArgs),
    /// Angle/range RMSE experiment with root-bound columns.
    Rmse(RunArgs),
    /// Bits-per-pulse table across the sweep axis.
    Rate(RunArgs),
    /// Closed forms against their Monte Carlo oracles.
    ValidateBounds(RunArgs),
    /// Analytic estimation-bound table over an RMSE-style sweep.
    Crb(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Experiment definition file (TOML).
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Named preset: fig3b|fig4|fig5|fig6a|fig6b|fig7|fig8|fig9|fig10.
    #[arg(long)]
    preset: Option<String>,
    /// Master seed override.
    #[arg(long)]
    seed: Option<u64>,
    /// CSV output path; a JSON provenance sidecar is written next to it.
    /// Without it the CSV goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker thread count (results are identical for any value).
    #[arg(long)]
    workers: Option<usize>,
}

impl RunArgs {
    fn spec(&self, default: Option<ExperimentSpec>) -> Result<ExperimentSpec, HarnessError> {
        let mut spec = if let Some(path) = &self.config {
            ExperimentSpec::from_toml_file(path)?
        } else if let Some(name) = &self.preset {
            ExperimentSpec::preset(name)?
        } else if let Some(spec) = default {
            spec
        } else {
            return Err(HarnessError::Config(
                "either --config or --preset is required".into(),
            ));
        };
        if let Some(seed) = self.seed {
            spec.seed = seed;
        }
        Ok(spec)
    }

    fn options(&self) -> RunOptions {
        match self.workers {
            Some(workers) => RunOptions { workers },
            None => RunOptions::default(),
        }
    }

    fn emit(&self, table: &ResultTable) -> Result<(), HarnessError> {
        match &self.out {
            Some(path) => table.write_files(path),
            None => {
                print!("{}", table.to_csv());
                Ok(())
            }
        }
    }
}

fn run(cli: Cli) -> Result<(), HarnessError> {
    match cli.command {
        Command::Ber(args) => {
            let spec = args.spec(None)?;
            args.emit(&run_ber_experiment(&spec, &args.options())?)
        }
        Command::Rmse(args) => {
            let spec = args.spec(None)?;
            args.emit(&run_rmse_experiment(&spec, &args.options())?)
        }
        Command::Rate(args) => {
            let spec = args.spec(None)?;
            args.emit(&run_rate_table(&spec)?)
        }
        Command::ValidateBounds(args) => {
            let default = ExperimentSpec::bound_validation(args.seed.unwrap_or(1));
            let spec = args.spec(Some(default))?;
            args.emit(&run_bound_validation(&spec, &args.options())?)
        }
        Command::Crb(args) => {
            let spec = args.spec(None)?;
            args.emit(&run_crb_table(&spec, &args.options())?)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            eprintln!("error: {error}");
            ExitCode::from(error.exit_code() as u8)
        }
    }
}
