use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

#[derive(Parser, Debug)]
#[command(
    name = "clientxva",
    version,
    about = "Client XVA strategy pricing and CDS shock analytics"
)]
struct Cli {
    /// TOML run configuration; built-in defaults when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Directory for output files.
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    out: PathBuf,

    /// Exposure grid step in years, overriding the config.
    #[arg(long, global = true, value_name = "YEARS")]
    grid_step: Option<f64>,

    /// Worker threads; all cores when omitted.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Price one strategy against the vanilla trade.
    Price(PriceArgs),
    /// Reset and Mandatory Break reduction tables over the configured grid.
    Grid,
    /// CDS improvement at which a Mandatory Break matches a Reset.
    Breakeven {
        /// Event time in years; the config value when omitted.
        #[arg(long)]
        event_time: Option<f64>,
    },
    /// Detect CDS shocks in a quote file.
    CdsAnalyze(CorpusArgs),
    /// Crisis timeline from shocks at the crisis threshold.
    CdsCrises(CorpusArgs),
    /// Spread changes after shocks in crisis periods.
    CdsRecovery(CorpusArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    Vanilla,
    Reset,
    MandatoryBreak,
    Restructuring,
}

#[derive(Args, Debug)]
struct PriceArgs {
    #[arg(long, value_enum, default_value = "vanilla")]
    strategy: StrategyArg,
    /// Reset or break time in years.
    #[arg(long)]
    event_time: Option<f64>,
    /// CDS shock in bps on top of the base level; the first configured shock when omitted.
    #[arg(long)]
    shock: Option<f64>,
    /// CDS improvement in bps by the break date.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    change: f64,
    /// Normal vol shift in bps for the continuation trade.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    dvol: f64,
    /// Write exposure profiles as CSV into the output directory.
    #[arg(long)]
    profiles: bool,
}

#[derive(Args, Debug)]
struct CorpusArgs {
    /// Quote CSV; the config's cds.corpus when omitted.
    #[arg(long, value_name = "PATH")]
    corpus: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {:#}", e.error);
            ExitCode::from(e.code)
        }
    }
}
