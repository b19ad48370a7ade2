use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lrs_cli::analyze::{cmd_analyze, Options};
use lrs_cli::input::Kind;
use lrs_cli::malcev::{cmd_malcev, MalcevOp};
use lrs_cli::report::Format;
use lrs_cli::selftest::{cmd_selftest, default_fixture_dir, Level};
use lrs_cli::CliError;

#[derive(Parser, Debug)]
#[command(name = "lrs", version, about = "Structure theory for bilinear maps, rings and nilpotent groups")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Print supporting witnesses where a stage has them.
    #[arg(long, global = true)]
    witnesses: bool,
    /// Largest nilpotency class accepted for Lie algebras.
    #[arg(long, default_value_t = lrs_core::malcev::MAX_CLASS, global = true)]
    max_class: usize,
    /// Largest width searched exactly before reporting an upper bound.
    #[arg(long, default_value_t = 16, global = true)]
    width_bound: usize,
    /// Seed for randomized splitting; output is deterministic for a fixed seed.
    #[arg(long, default_value_t = lrs_core::artinian::DEFAULT_SEED, global = true)]
    seed: u64,
    /// Work over base[a]/(c0 + c1*a + ...): comma-separated coefficients, constant term first.
    #[arg(long, value_delimiter = ',', global = true, allow_hyphen_values = true)]
    extension: Option<Vec<String>>,
    /// Fail when a residue field is larger than the base field instead of describing it.
    #[arg(long, global = true)]
    require_base: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the canonical pipeline for a document kind.
    Analyze {
        #[arg(value_enum)]
        kind: Kind,
        file: PathBuf,
    },
    /// Group operations in log coordinates of a nilpotent Lie algebra.
    Malcev {
        #[command(subcommand)]
        op: MalcevCommand,
    },
    /// Compare library results against brute-force oracles and check the fixtures.
    Selftest {
        #[arg(value_enum)]
        level: Level,
        #[arg(long)]
        fixtures: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum MalcevCommand {
    /// g * h
    Mul { file: PathBuf, left: String, right: String },
    /// g ^ a for a scalar a
    Pow {
        file: PathBuf,
        element: String,
        #[arg(allow_hyphen_values = true)]
        exponent: String,
    },
    /// g⁻¹ h⁻¹ g h
    Comm { file: PathBuf, left: String, right: String },
    /// Indecomposable factors and the divisible abelian factor.
    Decompose { file: PathBuf },
}

fn run(cli: Cli) -> Result<(String, bool), CliError> {
    let opts = Options {
        witnesses: cli.witnesses,
        max_class: cli.max_class,
        width_bound: cli.width_bound,
        seed: cli.seed,
        extension: cli.extension,
        require_base: cli.require_base,
    };
    let report = match cli.command {
        Command::Analyze { kind, file } => cmd_analyze(kind, &file, &opts)?,
        Command::Malcev { op } => {
            let (op, file) = match op {
                MalcevCommand::Mul { file, left, right } => (MalcevOp::Mul { left, right }, file),
                MalcevCommand::Pow { file, element, exponent } => (MalcevOp::Pow { element, exponent }, file),
                MalcevCommand::Comm { file, left, right } => (MalcevOp::Comm { left, right }, file),
                MalcevCommand::Decompose { file } => (MalcevOp::Decompose, file),
            };
            cmd_malcev(&op, &file, &opts)?
        }
        Command::Selftest { level, fixtures } => {
            let dir = fixtures.unwrap_or_else(default_fixture_dir);
            let (report, passed) = cmd_selftest(level, &dir);
            return Ok((report.render(cli.format), passed));
        }
    };
    Ok((report.render(cli.format), true))
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok((out, passed)) => {
            print!("{out}");
            if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
