//! Command-line experiment harness for `circov`.
//!
//! Every command resolves its parameters from flags layered over an optional
//! TOML file, runs deterministically from the master seed, and returns a
//! [`RunReport`] that renders as JSON or CSV.

pub mod commands;
pub mod config;
pub mod error;
pub mod plot;
pub mod report;

use std::path::PathBuf;

use clap::{ArgMatches, CommandFactory, FromArgMatches, Parser};

pub use commands::Command;
pub use config::{ExperimentConfig, Format, GlobalArgs};
pub use error::{CliError, ErrorReport, Result};
pub use plot::{emit_plotdata, PlotKind};
pub use report::{RunMetadata, RunReport, Table};

/// Top-level command line.
#[derive(Debug, Clone, Parser)]
#[command(name = "circov", version, about = "Random and orbit coverings of the circle: experiments")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    /// TOML file with default values; explicit flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

/// Parses `args` (including the program name) into a CLI value and its matches.
pub fn parse_args<I, T>(args: I) -> Result<(Cli, ArgMatches)>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let matches = Cli::command().try_get_matches_from(args)?;
    let cli = Cli::from_arg_matches(&matches)?;
    Ok((cli, matches))
}

/// Applies the config file (if any) under the explicit flags.
pub fn resolve(cli: &Cli, matches: &ArgMatches) -> Result<(ExperimentConfig, Command)> {
    let (name, sub) = matches
        .subcommand()
        .ok_or_else(|| CliError::Schema("a subcommand is required".into()))?;
    let file: Option<toml::Table> = match &cli.config {
        Some(path) => Some(std::fs::read_to_string(path)?.parse()?),
        None => None,
    };
    let global: GlobalArgs = config::layer(&cli.global, sub, file.as_ref())?;
    let section = match file.as_ref().and_then(|f| f.get(name)) {
        Some(toml::Value::Table(t)) => Some(t),
        Some(_) => return Err(CliError::Schema(format!("[{name}] must be a table"))),
        None => None,
    };
    let command = layer_command(&cli.command, sub, section)?;
    let cfg = ExperimentConfig {
        command: command.name().to_string(),
        global,
        params: command.params()?,
    };
    Ok((cfg, command))
}

fn layer_command(command: &Command, m: &ArgMatches, file: Option<&toml::Table>) -> Result<Command> {
    use config::layer;
    Ok(match command {
        Command::Shepp(a) => Command::Shepp(layer(a, m, file)?),
        Command::CoverSim(a) => Command::CoverSim(layer(a, m, file)?),
        Command::TreeRun(a) => Command::TreeRun(layer(a, m, file)?),
        Command::DimEstimate(a) => Command::DimEstimate(layer(a, m, file)?),
        Command::CasselsSearch(a) => Command::CasselsSearch(layer(a, m, file)?),
        Command::BohrCheck(a) => Command::BohrCheck(layer(a, m, file)?),
        Command::GcdsumCheck(a) => Command::GcdsumCheck(layer(a, m, file)?),
        Command::LocalCount(a) => Command::LocalCount(layer(a, m, file)?),
        Command::PsiRegime(a) => Command::PsiRegime(layer(a, m, file)?),
        Command::GapProfile(a) => Command::GapProfile(layer(a, m, file)?),
    })
}

/// Parses, resolves and runs; the building block of the binary and of tests.
pub fn run_cli<I, T>(args: I) -> Result<RunReport>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let (cli, matches) = parse_args(args)?;
    let (cfg, command) = resolve(&cli, &matches)?;
    command.run(&cfg)
}
