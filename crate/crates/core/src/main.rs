use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use k1inv::problem::parse_problem;
use k1inv::runner::{run_corpus, run_problem, run_verify, OutputFormat, RunOptions};

/// Exact computation of degree-one Milnor K-invariants of groups of
/// multiplicative type, from Galois-module data given as JSON.
#[derive(Parser)]
#[command(name = "k1inv", version, about)]
struct Cli {
    /// Report format
    #[arg(long, value_enum, default_value_t = FormatArg::Text, global = true)]
    format: FormatArg,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Text => OutputFormat::Text,
            FormatArg::Json => OutputFormat::Json,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the tasks listed in a problem file
    Compute {
        file: PathBuf,
        /// Override the modulus of every task that takes one
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        modulus: Option<u64>,
    },
    /// Run the exactness suites over every module in a problem file
    Verify { file: PathBuf },
    /// Run the built-in example corpus end to end
    Corpus,
    /// Run the tasks of a problem file with brute-force oracle paths forced
    Oracle {
        file: PathBuf,
        /// Override the modulus of every task that takes one
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        modulus: Option<u64>,
    },
}

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_INPUT_ERROR: u8 = 2;

fn load(file: &PathBuf) -> Result<k1inv::problem::ProblemFile, String> {
    let bytes = std::fs::read(file).map_err(|e| format!("{}: {e}", file.display()))?;
    parse_problem(&bytes).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format: OutputFormat = cli.format.into();

    let outcome = match &cli.command {
        Command::Compute { file, modulus } | Command::Oracle { file, modulus } => {
            let problem = match load(file) {
                Ok(p) => p,
                Err(message) => {
                    eprintln!("error: {message}");
                    return ExitCode::from(EXIT_INPUT_ERROR);
                }
            };
            let options = RunOptions {
                format,
                oracle: matches!(cli.command, Command::Oracle { .. }),
                modulus_override: *modulus,
            };
            run_problem(&problem, &options)
        }
        Command::Verify { file } => {
            let problem = match load(file) {
                Ok(p) => p,
                Err(message) => {
                    eprintln!("error: {message}");
                    return ExitCode::from(EXIT_INPUT_ERROR);
                }
            };
            run_verify(&problem, format)
        }
        Command::Corpus => run_corpus(format, false),
    };

    print!("{}", outcome.output);
    if outcome.failed {
        ExitCode::from(EXIT_CHECK_FAILED)
    } else {
        ExitCode::SUCCESS
    }
}
