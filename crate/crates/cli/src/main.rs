//! `improper-ic`: rate regions, SNR sweeps, asymptotics, fairness points and
//! the verification suite for the two-user improper-signaling interference
//! channel.

mod commands;
mod error;
mod output;
mod scenario;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use improper_ic::region::PfVariant;
use improper_ic::verify::{Fault, Level};

use crate::commands::VerifyOptions;
use crate::error::CliError;
use crate::scenario::{resolve, Overrides, ScenarioFile};

#[derive(Parser)]
#[command(name = "improper-ic", version, about = "Two-user SISO interference channel with improper Gaussian signaling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rate-region samples and boundaries as CSV.
    Region(Common),
    /// Maximum sum rates of each strategy over a list of SNRs, as CSV.
    SweepSnr {
        #[command(flatten)]
        common: Common,
        /// Comma-separated SNRs in dB.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        snr_list: Option<Vec<f64>>,
    },
    /// Low- and high-SNR report as JSON.
    Asymptotics(Common),
    /// Closed forms against brute-force oracles.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = LevelArg::Quick)]
        level: LevelArg,
        /// Do not print the JSON summary on standard error.
        #[arg(long)]
        no_machine_summary: bool,
        #[arg(long, value_enum, hide = true)]
        inject_fault: Option<FaultArg>,
    },
    /// Max-min and proportional-fairness points, improper against proper, as JSON.
    Fairness(Common),
}

#[derive(Args, Clone)]
struct Common {
    /// JSON scenario file; flags override its fields.
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Output file (standard output when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    g12: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    g21: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    phi12: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    phi21: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    snr_db: Option<f64>,
    #[arg(long)]
    dtau_points: Option<usize>,
    /// Points per axis of the full-rank and wide-band-slope grids.
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    boundary_points: Option<usize>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    pf_variant: Option<PfArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Quick,
    Full,
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultArg {
    BTable,
}

#[derive(Clone, Copy, ValueEnum)]
enum PfArg {
    Threat,
    Plain,
}

impl Common {
    fn overrides(&self, snr_list: Option<Vec<f64>>) -> Overrides {
        Overrides {
            g12: self.g12,
            g21: self.g21,
            phi12: self.phi12,
            phi21: self.phi21,
            snr_db: self.snr_db,
            seed: self.seed,
            snr_list_db: snr_list,
            pf_variant: self.pf_variant.map(|p| match p {
                PfArg::Threat => PfVariant::Threat,
                PfArg::Plain => PfVariant::Plain,
            }),
            dtau_points: self.dtau_points,
            fullrank_grid: self.grid,
            boundary_points: self.boundary_points,
            eps_dominance: self.eps,
        }
    }

    fn scenario(&self, snr_list: Option<Vec<f64>>) -> Result<scenario::Scenario, CliError> {
        let file = self.scenario.as_deref().map(ScenarioFile::load).transpose()?;
        resolve(file, &self.overrides(snr_list))
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Region(c) => commands::region(&c.scenario(None)?, c.out.as_deref()),
        Command::SweepSnr { common, snr_list } => {
            commands::sweep_snr(&common.scenario(snr_list)?, common.out.as_deref())
        }
        Command::Asymptotics(c) => commands::asymptotics(&c.scenario(None)?, c.out.as_deref()),
        Command::Fairness(c) => commands::fairness(&c.scenario(None)?, c.out.as_deref()),
        Command::Verify { common, level, no_machine_summary, inject_fault } => {
            let opts = VerifyOptions {
                level: match level {
                    LevelArg::Quick => Level::Quick,
                    LevelArg::Full => Level::Full,
                },
                machine_summary: !no_machine_summary,
                fault: match inject_fault {
                    Some(FaultArg::BTable) => Fault::BranchTable,
                    None => Fault::None,
                },
            };
            commands::verify(&common.scenario(None)?, &opts, common.out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
