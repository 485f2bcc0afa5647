use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use csi_loop::scenario::{parse_scenario, Scenario};
use csi_loop::sweep;

#[derive(Parser)]
#[command(
    name = "csi-loop",
    version,
    about = "Closed-loop MIMO CSI and link adaptation simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// One CSI evaluation: RI, PMI, SINR, CQI and γ statistics.
    Csi(RunArgs),
    /// Goodput for every forced CQI.
    SweepCqi(RunArgs),
    /// Closed-loop goodput over the scenario's SNR list.
    SweepSnr(RunArgs),
    /// Dump a precoder codebook.
    Codebook {
        #[arg(long, default_value_t = 4)]
        ports: u8,
        #[arg(long, default_value_t = 1)]
        rank: u8,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    drops: Option<usize>,
    #[arg(long)]
    slots: Option<u64>,
    /// Two-column goodput output instead of CSV.
    #[arg(long)]
    gnuplot: bool,
}

impl RunArgs {
    fn scenario(&self) -> anyhow::Result<Scenario> {
        let mut s = parse_scenario(&self.config)
            .with_context(|| format!("loading {}", self.config.display()))?;
        if let Some(seed) = self.seed {
            s.seed = seed;
        }
        if let Some(d) = self.drops {
            s.n_drops = d;
        }
        if let Some(n) = self.slots {
            s.n_slots = n;
        }
        s.validate()?;
        Ok(s)
    }
}

fn emit(text: &str, out: Option<&PathBuf>) -> anyhow::Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Csi(args) => {
            let c = sweep::run_csi_inspect(&args.scenario()?)?;
            emit(&sweep::csi_inspection_csv(&c), args.out.as_ref())
        }
        Command::SweepCqi(args) => {
            let rows = sweep::run_sweep_cqi(&args.scenario()?)?;
            let text = if args.gnuplot {
                sweep::cqi_rows_gnuplot(&rows)
            } else {
                sweep::cqi_rows_csv(&rows)
            };
            emit(&text, args.out.as_ref())
        }
        Command::SweepSnr(args) => {
            let rows = sweep::run_sweep_snr(&args.scenario()?)?;
            let text = if args.gnuplot {
                sweep::snr_rows_gnuplot(&rows)
            } else {
                sweep::snr_rows_csv(&rows)
            };
            emit(&text, args.out.as_ref())
        }
        Command::Codebook { ports, rank, out } => {
            emit(&sweep::dump_codebook(ports, rank)?, out.as_ref())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
