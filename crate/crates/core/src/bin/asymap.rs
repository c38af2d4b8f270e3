use std::path::PathBuf;
use std::process::ExitCode;

use asymap::archetypoids::DEFAULT_BUDGET;
use asymap::pipeline::{
    cmd_ada, cmd_compare, cmd_hplot, cmd_ingest, cmd_pipeline, Format, KRange, PipelineConfig, RunFailure,
    RunReport, DEFAULT_RESTARTS, DEFAULT_THRESHOLD,
};
use clap::{Args, Parser, Subcommand};

const EXIT_FAILURE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

/// H-plot maps of asymmetric dissimilarities and their archetypoids.
#[derive(Parser)]
#[command(name = "asymap", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Turn a citation table into a rank dissimilarity matrix.
    Ingest(Opts),
    /// Embed the to- and from-profiles and report goodness of fit.
    Hplot(Opts),
    /// Archetypoid analysis on the combined h-plot profiles.
    Ada(Opts),
    /// Unfolding, citation network and silhouette comparators.
    Compare(Opts),
    /// Every stage in sequence, with a manifest.
    Pipeline(Opts),
}

#[derive(Args)]
struct Opts {
    /// Dissimilarity CSV, citation JSON, or count CSV then meta CSV.
    #[arg(long, required = true, num_args = 1..=2)]
    input: Vec<PathBuf>,
    #[arg(long, env = "ASYMAP_OUT_DIR", default_value = "asymap-out")]
    out_dir: PathBuf,
    #[arg(long)]
    k: Option<usize>,
    /// Inclusive, e.g. 1..10.
    #[arg(long, value_parser = parse_k_range)]
    k_range: Option<KRange>,
    /// Check every fit against full enumeration.
    #[arg(long)]
    exhaustive: bool,
    /// Largest number of subsets the exhaustive search may evaluate.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u128,
    #[arg(long, default_value_t = DEFAULT_RESTARTS)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Keep network edges with dissimilarity at or below this value.
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    threshold: f64,
    /// Repeatable; all formats when omitted.
    #[arg(long = "format", value_parser = parse_format)]
    formats: Vec<Format>,
}

fn parse_k_range(s: &str) -> Result<KRange, String> {
    s.parse().map_err(|e: asymap::Error| e.to_string())
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse().map_err(|e: asymap::Error| e.to_string())
}

impl From<Opts> for PipelineConfig {
    fn from(o: Opts) -> Self {
        PipelineConfig {
            k: o.k,
            k_range: o.k_range,
            exhaustive: o.exhaustive,
            budget: o.budget,
            restarts: o.restarts,
            seed: o.seed,
            threshold: o.threshold,
            formats: o.formats,
            ..PipelineConfig::new(o.input, o.out_dir)
        }
    }
}

fn print_report(r: &RunReport) {
    for m in &r.messages {
        println!("{m}");
    }
    for w in &r.warnings {
        eprintln!("warning: {w}");
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Ingest(o) => cmd_ingest(&o.into()),
        Command::Hplot(o) => cmd_hplot(&o.into()),
        Command::Ada(o) => cmd_ada(&o.into()),
        Command::Compare(o) => cmd_compare(&o.into()),
        Command::Pipeline(o) => cmd_pipeline(&o.into()),
    };
    match result {
        Ok(report) => {
            print_report(&report);
            ExitCode::SUCCESS
        }
        Err(RunFailure { stage, error, report }) => {
            if let Some(r) = &report {
                print_report(r);
            }
            match stage {
                Some(s) => eprintln!("error: {s} stage failed: {error}"),
                None => eprintln!("error: {error}"),
            }
            if report.is_some() {
                eprintln!("partial outputs kept; manifest marked partial");
            }
            let code = if !error.is_input_error() {
                EXIT_NUMERICAL
            } else if matches!(error, asymap::Error::Io { .. }) && report.is_some() {
                // failing to write outputs is neither bad input nor bad numerics
                EXIT_FAILURE
            } else {
                EXIT_INPUT
            };
            ExitCode::from(code)
        }
    }
}
