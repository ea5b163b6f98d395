use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use watson_core::syndrome::DEFAULT_K_MAX;

#[derive(Parser)]
#[command(name = "watson", version, about = "Operator tool for decision-support domains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a domain file and report every problem found.
    Validate { domain: PathBuf },
    /// Mine minimal antisyndromes of one training sample.
    Mine {
        /// Domain or schema file; numeric bins are taken from its `bins`.
        schema: PathBuf,
        sample: PathBuf,
        #[arg(long, default_value_t = DEFAULT_K_MAX)]
        kmax: usize,
        /// Also run the brute-force enumeration and fail on any difference.
        #[arg(long)]
        oracle: bool,
    },
    /// Run a scripted session in-process and compare the questions asked.
    Replay {
        domain: PathBuf,
        script: PathBuf,
        /// Overrides the script's seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        json: bool,
    },
    /// List a user's precedents in a store directory.
    Inspect {
        datadir: PathBuf,
        #[arg(long)]
        user: String,
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Validate { domain } => watson_cli::validate(domain),
        Command::Mine { schema, sample, kmax, oracle } => watson_cli::mine(schema, sample, *kmax, *oracle),
        Command::Replay { domain, script, seed, json } => watson_cli::replay(domain, script, *seed, *json),
        Command::Inspect { datadir, user, json } => watson_cli::inspect(datadir, user, *json),
    };
    match result {
        Ok(report) => {
            print!("{}", report.text);
            if report.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
