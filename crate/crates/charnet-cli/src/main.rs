//! Command-line front end: reads a corpus directory, runs the requested
//! analysis, and writes plot-ready CSV/JSON artifacts. Plots themselves
//! are out of scope; every figure-shaped output is a table.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

/// Exit status 1: bad input (paths, file formats, references).
/// Exit status 2: a computation could not be carried out.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Compute(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Compute(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Compute(m) => m,
        }
    }
}

macro_rules! input_error {
    ($t:ty) => {
        impl From<$t> for CliError {
            fn from(e: $t) -> CliError {
                CliError::Input(e.to_string())
            }
        }
    };
}
macro_rules! compute_error {
    ($t:ty) => {
        impl From<$t> for CliError {
            fn from(e: $t) -> CliError {
                CliError::Compute(e.to_string())
            }
        }
    };
}
input_error!(charnet::CorpusError);
input_error!(std::io::Error);
compute_error!(charnet::graph::GraphError);
compute_error!(charnet::metrics::MetricsError);
compute_error!(charnet::fitting::FitError);
compute_error!(charnet::nullmodels::ModelError);
compute_error!(charnet::dynamics::DynamicsError);
compute_error!(charnet::robustness::AttackError);
compute_error!(charnet::gender::GenderError);
compute_error!(charnet::typology::TypologyError);

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "charnet",
    version,
    about = "Character co-occurrence network extraction and analysis"
)]
pub struct Cli {
    /// Corpus directory (characters.tsv, volumes.tsv, scenes.tsv[, arcs.tsv])
    #[arg(long, global = true, default_value = ".")]
    input: PathBuf,

    /// Output directory for report artifacts
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Master seed for every randomized computation
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    /// Ensemble replicates / attack trials
    #[arg(long, global = true, default_value_t = 25)]
    replicates: usize,

    /// Remove characters with this many scenes or fewer
    #[arg(long = "occ-min", global = true, default_value_t = 3)]
    occ_min: u32,

    /// Keep only vertices with at least this many partners
    #[arg(long = "deg-min", global = true, default_value_t = 2)]
    deg_min: u32,

    /// Keep only the largest component after filtering
    #[arg(long = "giant-only", global = true, default_value_t = true, action = clap::ArgAction::Set)]
    giant_only: bool,

    /// Evaluate the degree criterion on the occurrence-filtered subgraph
    /// instead of the full graph
    #[arg(long = "seq-degree", global = true, default_value_t = false)]
    seq_degree: bool,

    /// Report format for structured outputs
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,

    /// Recompute the target ranking after every removal (attack)
    #[arg(long, global = true, default_value_t = false)]
    recompute: bool,

    /// Observation window as scene positions T0:T1 (dynamics)
    #[arg(long, global = true)]
    window: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and validate the corpus, printing summary counts
    Validate,
    /// Build the co-occurrence graph and export edge list + vertex table
    Extract,
    /// Apply minor-character filtering and export the filtered network
    Filter,
    /// Topological summary, centralities, and degree-scaling functions
    Stats {
        /// Analyze a plain edge list instead of the corpus
        #[arg(long)]
        edgelist: Option<PathBuf>,
    },
    /// Heavy-tail fits of the degree and occurrence distributions
    Fit {
        /// Bootstrap replicates for the goodness-of-fit p-value (0 = off)
        #[arg(long = "bootstrap", default_value_t = 0)]
        bootstrap: usize,
    },
    /// Reference-model ensembles and the small-world verdict
    Null,
    /// Cumulative growth series and attachment-rate curves
    Dynamics {
        /// Sample the cumulative series every N scenes
        #[arg(long = "sample-every", default_value_t = 25)]
        sample_every: usize,
    },
    /// Vertex-removal attack curves
    Attack {
        /// Strategy to run (default: all five)
        #[arg(long)]
        strategy: Option<String>,
        /// Largest fraction of vertices to remove
        #[arg(long = "max-fraction", default_value_t = 0.95)]
        max_fraction: f64,
        /// Grid step
        #[arg(long, default_value_t = 0.05)]
        step: f64,
    },
    /// Sex proportions, censuses, ratios, scene stages, significance tests
    Gender,
    /// Classify narrative-arc networks against their reference labels
    Typology,
    /// Run everything and emit the full report set
    Report,
    /// Convert a published dataset layout into the canonical one
    Import {
        /// Source dataset directory
        #[arg(long)]
        from: PathBuf,
        /// Column-mapping file (JSON); see the README for the schema
        #[arg(long)]
        mapping: PathBuf,
        /// Attach the built-in narrative-arc catalog for the Thorgal series
        #[arg(long = "builtin-arcs", default_value_t = false)]
        builtin_arcs: bool,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints its own message; usage problems are input errors
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS // --help / --version
            };
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
