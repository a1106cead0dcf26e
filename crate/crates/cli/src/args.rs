use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(
    name = "reqsmell",
    version,
    about = "Detects requirements smells in natural-language requirements"
)]
pub struct Cli {
    /// Config file (default: ./reqsmell.toml when present)
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Log verbosity (error, warn, info, debug, trace)
    #[arg(long, global = true, value_name = "LEVEL")]
    pub log_level: Option<String>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analyse requirements files and write findings and a metrics report
    Analyze(AnalyzeArgs),
    /// Compare findings against a gold standard
    Eval(EvalArgs),
    /// Serve the review API (and a static web UI)
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Json,
}

/// Options shared by `analyze` and `serve --analyze`.
#[derive(Debug, Clone, Default, Args)]
pub struct DetectArgs {
    /// Input format for every file (txt, md, csv, jsonl); default: by extension
    #[arg(long, value_name = "FORMAT")]
    pub format: Option<String>,

    /// CSV column holding the requirement id
    #[arg(long, value_name = "COLUMN")]
    pub csv_id: Option<String>,

    /// CSV column holding the requirement text
    #[arg(long, value_name = "COLUMN")]
    pub csv_text: Option<String>,

    /// Directory of <Smell>.dict files replacing the bundled dictionaries
    #[arg(long, env = "REQSMELL_DICTIONARY_DIR", value_name = "DIR")]
    pub dictionary_dir: Option<PathBuf>,

    /// Lexicon directory replacing the bundled lexicon
    #[arg(long, env = "REQSMELL_LEXICON_DIR", value_name = "DIR")]
    pub lexicon_dir: Option<PathBuf>,

    /// Comma-separated smells to detect (default: all)
    #[arg(long, value_name = "LIST", value_delimiter = ',')]
    pub smells: Option<Vec<String>>,

    /// Flag negations inside conditions instead of reporting them plainly
    #[arg(long)]
    pub condition_suppression: bool,

    /// Flag comparatives in numeric comparisons ("more than 5")
    #[arg(long)]
    pub numeric_suppression: bool,

    /// Parallel file analysis (default: logical cores)
    #[arg(long, value_name = "N")]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Files or directories to analyse
    #[arg(value_name = "INPUT")]
    pub inputs: Vec<PathBuf>,

    #[command(flatten)]
    pub detect: DetectArgs,

    /// Count suppressed findings in densities
    #[arg(long)]
    pub include_suppressed: bool,

    /// Metrics report format
    #[arg(long, value_enum, value_name = "FORMAT")]
    pub report: Option<ReportFormat>,

    /// Output directory, or `-` to print the report to stdout
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,

    /// Exit with status 3 when the overall density (findings per 1000 words) exceeds X
    #[arg(long, value_name = "X")]
    pub fail_on_density: Option<f64>,

    /// Also store the run in this run store
    #[arg(long, value_name = "DIR")]
    pub store: Option<PathBuf>,

    /// Write N randomly chosen findings per artifact to sample.json
    #[arg(long, value_name = "N")]
    pub sample: Option<usize>,

    /// Seed for --sample
    #[arg(long, value_name = "SEED")]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Tool findings (JSON array or JSON lines)
    #[arg(long, value_name = "FILE")]
    pub predictions: Option<PathBuf>,

    /// Gold spans (JSON array or JSON lines)
    #[arg(long, value_name = "FILE")]
    pub gold: Option<PathBuf>,

    /// Span matching policy (exact or overlap)
    #[arg(long, value_name = "POLICY")]
    pub policy: Option<String>,

    /// Merge the four dictionary smells into one recall row
    #[arg(long)]
    pub group_ambiguity: bool,

    /// Print the report as JSON
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    /// Run directory or run store to serve
    #[arg(value_name = "RUN_DIR")]
    pub run_dir: Option<PathBuf>,

    /// Port to listen on
    #[arg(long, env = "REQSMELL_PORT", value_name = "PORT")]
    pub port: Option<u16>,

    /// Address to bind
    #[arg(long, value_name = "ADDR")]
    pub bind: Option<String>,

    /// Analyse these inputs into the store first, then serve the store
    #[arg(long, value_name = "INPUT", num_args = 1..)]
    pub analyze: Vec<PathBuf>,

    /// Run store used by --analyze
    #[arg(long, value_name = "DIR")]
    pub store: Option<PathBuf>,

    /// Directory with the built web UI
    #[arg(long, value_name = "DIR")]
    pub static_dir: Option<PathBuf>,

    /// Enable permissive CORS for a separately served UI
    #[arg(long)]
    pub dev: bool,

    #[command(flatten)]
    pub detect: DetectArgs,
}
