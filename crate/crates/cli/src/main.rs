//! `augtrack`: design, analyze, simulate and validate fixed-gain tracking
//! filters from the command line.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "augtrack",
    version,
    about = "Fixed-gain augmented-state tracking filter toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Place the observer poles and extract filter coefficients.
    Design {
        /// Model spec JSON, or {"alpha_beta": {...}} for an alpha-beta tracker.
        spec: PathBuf,
        /// Design JSON output (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute steady-state metrics and the frequency response of a design.
    Analyze {
        /// Design JSON written by `design`.
        design: PathBuf,
        /// Rows of the response CSV, spanning f in [0, 0.5].
        #[arg(long, default_value_t = 2048, value_parser = clap::value_parser!(u32).range(2..))]
        grid: u32,
        /// Frequency of interest in rad/sample (defaults to the design's turn rate times ts).
        #[arg(long)]
        omega_man: Option<f64>,
        /// Measurement noise standard deviation in pix.
        #[arg(long, default_value_t = 1.0)]
        sigma_sns: f64,
        /// Turn radius in pix.
        #[arg(long, default_value_t = 10.0)]
        radius: f64,
        /// Output prefix; writes PREFIX.metrics.json and PREFIX.response.csv
        /// (defaults to the design path without its extension).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte-Carlo evaluation of one or more designs on a scenario.
    Simulate {
        /// Scenario configuration JSON; flags override its fields.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Scenario id: 1 manoeuvre, 2 circle, 3 straight line.
        #[arg(long)]
        scenario: Option<u8>,
        #[arg(long, default_value_t = 100)]
        reps: usize,
        /// PRNG seed; the AUGTRACK_SEED environment variable takes precedence.
        #[arg(long)]
        seed: Option<u64>,
        /// Design JSON; repeat for several filters.
        #[arg(long = "filter", required = true)]
        filters: Vec<PathBuf>,
        /// Stats JSON output (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-frame CSV of the first repetition; one file per filter when
        /// several are given.
        #[arg(long)]
        frames_csv: Option<PathBuf>,
    },
    /// Run the golden reference suite.
    Validate {
        /// Also write the rows as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, hide = true, default_value_t = 0.0)]
        perturb: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Design { spec, out } => commands::design(&spec, out.as_deref()),
        Command::Analyze {
            design,
            grid,
            omega_man,
            sigma_sns,
            radius,
            out,
        } => commands::analyze(&commands::AnalyzeArgs {
            design,
            grid: grid as usize,
            omega_man,
            sigma_sns,
            radius,
            out,
        }),
        Command::Simulate {
            config,
            scenario,
            reps,
            seed,
            filters,
            out,
            frames_csv,
        } => commands::simulate(&commands::SimulateArgs {
            config,
            scenario,
            reps,
            seed,
            filters,
            out,
            frames_csv,
        }),
        Command::Validate { out, perturb } => commands::validate(out.as_deref(), perturb),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
