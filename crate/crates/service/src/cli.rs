use aspectsim_core::corpus::CorpusFormat;
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(
    name = "aspectsim",
    version,
    about = "Aspect-wise similarity analysis of citation networks"
)]
pub struct Cli {
    /// JSON file with optional `ingest`, `topology` and `thresholds` sections.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a CSV/JSON export and write the corpus.
    Ingest(IngestArgs),
    /// Embed all four aspects.
    Embed(EmbedArgs),
    /// Classify every pair per aspect and write the pair stores.
    Classify(ClassifyArgs),
    /// Sweep thresholds of the topology and author embeddings against the
    /// exact relations.
    Calibrate(CalibrateArgs),
    /// Reproduce the analysis tables.
    Report {
        #[command(subcommand)]
        which: ReportKind,
    },
    /// Serve the HTTP API.
    Serve(ServeArgs),
    /// Write a seeded synthetic corpus as JSON rows.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Preset {
    Default,
    Vispubdata,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    Csv,
    Json,
}

impl From<InputFormat> for CorpusFormat {
    fn from(f: InputFormat) -> Self {
        match f {
            InputFormat::Csv => CorpusFormat::Csv,
            InputFormat::Json => CorpusFormat::Json,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct WorkDir {
    /// Work directory holding the pipeline artifacts.
    #[arg(long, default_value = "work")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Defaults to the file extension.
    #[arg(long, value_enum)]
    pub format: Option<InputFormat>,
    /// Column layout; `--config` ingest settings take precedence.
    #[arg(long, value_enum, default_value = "default")]
    pub preset: Preset,
    #[command(flatten)]
    pub dir: WorkDir,
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    #[command(flatten)]
    pub dir: WorkDir,
    /// Seed for topology training.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Single-threaded, bit-reproducible topology training.
    #[arg(long)]
    pub deterministic: bool,
    /// Training threads when not deterministic (0 = all cores).
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    /// Use externally produced text vectors instead of TF-IDF.
    #[arg(long)]
    pub text_vectors: Option<PathBuf>,
    /// Project TF-IDF vectors to this many dimensions.
    #[arg(long)]
    pub projection_dim: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub dir: WorkDir,
    /// JSON thresholds file (`{"text": {"theta_hi": .., "theta_lo": ..}, ...}`).
    #[arg(long)]
    pub thresholds: Option<PathBuf>,
    /// Store the exact topology and author relations instead of embeddings.
    #[arg(long)]
    pub exact_mode: bool,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    #[command(flatten)]
    pub dir: WorkDir,
    /// Threshold grid as `from:to:step`.
    #[arg(long, default_value = "0.05:0.95:0.05")]
    pub grid: String,
    /// Write the table here instead of stdout.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[command(flatten)]
    pub dir: WorkDir,
    /// Use the exact topology and author relations.
    #[arg(long)]
    pub exact_mode: bool,
    #[arg(long, value_enum, default_value = "json")]
    pub format: OutputFormat,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum ReportKind {
    /// Intra-set citations, self-citations and text-similar pairs without a
    /// citation link.
    #[command(name = "use-case-1")]
    UseCase1(ReportArgs),
    /// Keyword or author tracking with topic clusters.
    #[command(name = "use-case-2")]
    UseCase2 {
        #[command(flatten)]
        common: ReportArgs,
        #[arg(long, default_value = "clustering")]
        keyword: String,
        #[arg(long)]
        author: Option<String>,
    },
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[command(flatten)]
    pub dir: WorkDir,
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub bind: String,
    #[arg(long)]
    pub exact_mode: bool,
    /// Directory of uploaded abstracts (`.txt`) or vectors.
    #[arg(long)]
    pub watch_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 300)]
    pub articles: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Output JSON file, loadable with `ingest --format json`.
    #[arg(long)]
    pub out: PathBuf,
}
