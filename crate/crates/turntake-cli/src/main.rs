//! Command-line front end for corpus-scale turn-taking annotation work:
//! validation, segmentation proposals, agreement reports, distribution
//! statistics, dynamics timelines and format conversion.

mod commands;
mod config;

use clap::{ArgMatches, CommandFactory, FromArgMatches, Parser, Subcommand};
use config::RunConfig;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(
    name = "turntake",
    version,
    about = "Turn-taking annotation toolkit for Praat TextGrid corpora"
)]
struct Cli {
    /// Config file with `key = value` lines; flags take precedence.
    /// Defaults to the path in TURNTAKE_CONFIG when set.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Directory all reports and derived files are written to.
    #[arg(long, global = true, default_value = "turntake-out", value_name = "DIR")]
    out_dir: PathBuf,

    /// Minimum silence splitting same-speaker units, milliseconds.
    #[arg(long, global = true, default_value_t = 150.0, value_name = "MS")]
    ipu_threshold_ms: f64,

    /// Tolerance for boundary-coincidence checks, milliseconds.
    #[arg(long, global = true, default_value_t = 20.0, value_name = "MS")]
    tolerance_ms: f64,

    /// Silence after which turn allocation counts as unclear, seconds.
    #[arg(long, global = true, default_value_t = 2.0, value_name = "S")]
    lapse_s: f64,

    /// Macro-category scheme: turn-taking or completeness.
    #[arg(long, global = true, default_value = "turn-taking", value_name = "NAME")]
    scheme: String,

    /// Token classifier rules file: `marker<TAB>class` lines.
    #[arg(long, global = true, value_name = "FILE")]
    classifier: Option<PathBuf>,

    /// Tier mapping file: `stem<TAB>tier<TAB>layer<TAB>speaker` lines.
    #[arg(long, global = true, value_name = "FILE")]
    tier_map: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Lint labeled conversations; exit 2 on error-severity findings.
    Validate {
        /// TextGrid files or directories containing them.
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Propose inter-pausal units from word tiers into new
    /// `IPU-auto-<speaker>` tiers.
    Segment {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Compare two annotation rounds of the same recording.
    Agree {
        /// Annotation layer to compare.
        #[arg(long, default_value = "ipu")]
        layer: String,
        file_a: PathBuf,
        file_b: PathBuf,
    },
    /// Label distributions, turn structure and speaking time.
    Stats {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Colour-categorized timeline SVG and CSV per conversation.
    Dynamics {
        /// Annotation layer to draw: ipu or pcomp.
        #[arg(long, default_value = "ipu")]
        layer: String,
        /// Window start in seconds (default: recording start).
        #[arg(long, value_name = "S")]
        from_s: Option<f64>,
        /// Window end in seconds (default: recording end).
        #[arg(long, value_name = "S")]
        to_s: Option<f64>,
        /// Output width in pixels.
        #[arg(long, default_value_t = 1000.0, value_name = "PX")]
        width_px: f64,
        /// Axis tick spacing in seconds.
        #[arg(long, default_value_t = 10.0, value_name = "S")]
        tick_s: f64,
        /// Palette file with `category=#RRGGBB` lines.
        #[arg(long, value_name = "FILE")]
        palette: Option<PathBuf>,
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Re-encode TextGrids as UTF-8 in the chosen text form.
    Convert {
        /// Output form: long or short.
        #[arg(long, default_value = "long")]
        form: String,
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
}

fn main() -> ExitCode {
    let matches = Cli::command().get_matches();
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match run(cli, &matches) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("turntake: error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli, matches: &ArgMatches) -> anyhow::Result<ExitCode> {
    let config = RunConfig::resolve(matches)?;
    std::fs::create_dir_all(&config.out_dir)?;
    match cli.command {
        Command::Validate { inputs } => commands::validate(&config, &inputs),
        Command::Segment { inputs } => commands::segment(&config, &inputs),
        Command::Agree {
            layer,
            file_a,
            file_b,
        } => commands::agree(&config, &layer, &file_a, &file_b),
        Command::Stats { inputs } => commands::stats(&config, &inputs),
        Command::Dynamics {
            layer,
            from_s,
            to_s,
            width_px,
            tick_s,
            palette,
            inputs,
        } => commands::dynamics(
            &config,
            &layer,
            from_s,
            to_s,
            width_px,
            tick_s,
            palette.as_deref(),
            &inputs,
        ),
        Command::Convert { form, inputs } => commands::convert(&config, &form, &inputs),
    }
}
