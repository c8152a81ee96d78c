//! `ofdmpa`: SE/EE sweeps, optimal loading factors, PA-switching frontiers
//! and Monte Carlo validation for clipped OFDM links.

mod commands;
mod config;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ofdmpa_core::Error;
use serde_json::json;

use crate::config::{Options, Settings};

#[derive(Parser, Debug)]
#[command(name = "ofdmpa", version, about = "Spectral and energy efficiency of clipped OFDM transmitters")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    options: Options,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// SE against loading factor: exact, ideal bound and IBO approximation
    SeSweep,
    /// EE against loading factor with the consumption model
    EeSweep,
    /// Joined (SE, EE) pairs with Pareto-window classification
    Tradeoff,
    /// PA-switching frontiers for the switching set-ups
    PasFrontier,
    /// Monte Carlo check of the analytic SE and output distribution
    McValidate,
    /// List the PA datasheet with drain efficiencies
    Datasheet,
    /// Closed-form and exact SE- and EE-optimal loading factors
    OptimalXi,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::SeSweep => "se-sweep",
            Command::EeSweep => "ee-sweep",
            Command::Tradeoff => "tradeoff",
            Command::PasFrontier => "pas-frontier",
            Command::McValidate => "mc-validate",
            Command::Datasheet => "datasheet",
            Command::OptimalXi => "optimal-xi",
        }
    }
}

fn kind(e: &Error) -> &'static str {
    match e {
        Error::Domain { .. } => "domain",
        Error::Integration { .. } => "integration",
        Error::Infeasible(_) => "infeasible",
        Error::Config(_) => "config",
        Error::Estimator(_) => "estimator",
        Error::NotAvailable(_) => "not_available",
        Error::Format(_) => "format",
        Error::Io(_) => "io",
    }
}

fn error_record(command: &str, kind: &str, message: &str) {
    eprintln!("{}", json!({ "error": { "command": command, "kind": kind, "message": message } }));
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            error_record("", "usage", e.to_string().trim());
            return ExitCode::from(2);
        }
    };
    let name = cli.command.name();
    let result = Settings::resolve(&cli.options).and_then(|mut settings| {
        match cli.command {
            Command::SeSweep => commands::se_sweep_cmd(&mut settings),
            Command::EeSweep => commands::ee_sweep_cmd(&mut settings),
            Command::Tradeoff => commands::tradeoff_cmd(&mut settings),
            Command::PasFrontier => commands::pas_frontier_cmd(&mut settings),
            Command::McValidate => commands::mc_validate_cmd(&mut settings),
            Command::Datasheet => commands::datasheet_cmd(&mut settings),
            Command::OptimalXi => commands::optimal_xi_cmd(&mut settings),
        }
    });
    match result {
        Ok(paths) => {
            for p in paths {
                eprintln!("wrote {}", p.display());
            }
            ExitCode::SUCCESS
        }
        // downstream reader closed early, e.g. `| head`
        Err(Error::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            error_record(name, kind(&e), &e.to_string());
            ExitCode::FAILURE
        }
    }
}
