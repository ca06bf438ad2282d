//! Command-line front end for the heavy-tailed cubature filtering library:
//! runs the bearings-only tracking study from a config file, checks the
//! integration rules' advertised statistical properties, and estimates a few
//! built-in demo integrals against numeric oracles.

mod check_rule;
mod integrate;
mod oracle;
mod run;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "stcubature",
    version,
    about = "Heavy-tailed stochastic cubature: tracking studies, rule checks, demo integrals"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured tracking study and write CSV tables.
    Run(run::RunArgs),
    /// Statistically verify the integration rules' advertised properties.
    CheckRule(check_rule::CheckRuleArgs),
    /// Estimate one of the built-in demo integrals with a chosen rule.
    Integrate(integrate::IntegrateArgs),
}

/// Failures split by exit class: a rejected configuration or flag value
/// exits 2, trouble during an otherwise well-configured run exits 1.
enum Failure {
    Config(String),
    Runtime(String),
}

impl From<stcubature::Error> for Failure {
    fn from(e: stcubature::Error) -> Self {
        match e {
            stcubature::Error::Config(_) | stcubature::Error::DofTooSmall { .. } => {
                Failure::Config(e.to_string())
            }
            other => Failure::Runtime(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => run::execute(args),
        Command::CheckRule(args) => check_rule::execute(args),
        Command::Integrate(args) => integrate::execute(args),
    };
    match outcome {
        Ok(code) => code,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
