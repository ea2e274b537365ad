//! `docfuzz`: documentation-guided fuzzing from the command line.
//!
//! Exit codes: 0 = success (for `fuzz`/`pipeline`: no bugs), 1 = bugs found
//! (or a reproducer did not reproduce), 2 = usage or configuration error.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use docfuzz_core::orchestrator::Target;
use tracing_subscriber::EnvFilter;

#[derive(Debug, Parser)]
#[command(name = "docfuzz", version, about = "Documentation-guided API fuzzing")]
pub struct Cli {
    /// TOML or JSON pipeline config; command-line flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Log filter (e.g. `info`, `docfuzz_core=debug`); logs go to stderr as JSON lines.
    #[arg(long, global = true)]
    pub log_level: Option<String>,
    /// Run corpus stages on one thread instead of the rayon pool.
    #[arg(long, global = true)]
    pub sequential: bool,
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Classify docstrings and parse signatures and @param blocks.
    Parse(ParseArgs),
    /// Build standardized API information from parsed docs.
    Enrich(EnrichArgs),
    /// Resolve constraint sets and generation order.
    Extract(ExtractArgs),
    /// Run a fuzzing campaign.
    Fuzz(FuzzArgs),
    /// Render a campaign report and its budget sweep.
    Report(ReportArgs),
    /// Re-run one bug's recorded case.
    Repro(ReproArgs),
    /// parse, enrich, extract, fuzz and report in one go.
    Pipeline(PipelineArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Bundled {
    /// The three documentation shapes (full docs, signature only, none).
    Listings,
    /// Docstrings of the mock target.
    Mock,
}

#[derive(Debug, Args)]
pub struct DocsInput {
    /// JSON array of {api_path, body} objects.
    #[arg(long = "in", conflicts_with = "bundled")]
    pub input: Option<PathBuf>,
    /// Use a built-in docstring corpus instead of --in.
    #[arg(long, value_enum)]
    pub bundled: Option<Bundled>,
}

#[derive(Debug, Args)]
pub struct ParseArgs {
    #[command(flatten)]
    pub docs: DocsInput,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
pub enum Backend {
    /// Infer signature-only APIs from the documented corpus.
    #[default]
    Corpus,
    /// Ask an external model; needs --llm-endpoint.
    Llm,
}

#[derive(Debug, Args, Default)]
pub struct LlmArgs {
    /// How signature-only APIs are enriched.
    #[arg(long, value_enum, default_value_t = Backend::Corpus)]
    pub backend: Backend,
    /// Endpoint taking `{model, prompt}` for `--backend llm`; the key is read from DOCFUZZ_LLM_KEY.
    #[arg(long)]
    pub llm_endpoint: Option<String>,
    #[arg(long, default_value = "gpt-4")]
    pub llm_model: String,
    #[arg(long, default_value_t = 60_000)]
    pub llm_timeout_ms: u64,
}

#[derive(Debug, Args)]
pub struct EnrichArgs {
    /// Output of `docfuzz parse`.
    #[arg(long = "sigs", visible_alias = "in")]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Extra standardized infos to learn parameter patterns from.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[command(flatten)]
    pub llm: LlmArgs,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    #[arg(long)]
    pub std: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Default)]
pub struct CampaignArgs {
    /// `mock` or `module:<name>`.
    #[arg(long)]
    pub target: Option<Target>,
    /// Cases per API.
    #[arg(long)]
    pub budget: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Strategy to switch off: type, size, value_noise, value_mask, value_division. Repeatable.
    #[arg(long, value_delimiter = ',')]
    pub disable: Vec<String>,
    #[arg(long)]
    pub adversarial_ratio: Option<f64>,
    /// Worker executable, started as `<worker> --target <target>`.
    #[arg(long, env = "DOCFUZZ_WORKER")]
    pub worker: Option<String>,
    #[arg(long)]
    pub timeout_ms: Option<u64>,
    /// Parallel lanes, each with its own worker.
    #[arg(long, alias = "parallel")]
    pub parallel_workers: Option<usize>,
    /// Exception type accepted as graceful rejection of adversarial input. Repeatable.
    #[arg(long)]
    pub allow: Vec<String>,
    /// Only fuzz these APIs. Repeatable.
    #[arg(long)]
    pub api: Vec<String>,
    /// Write a transcript of every outcome for later --replay.
    #[arg(long, conflicts_with = "replay")]
    pub record: Option<PathBuf>,
    /// Answer cases from a recorded transcript instead of a worker.
    #[arg(long)]
    pub replay: Option<PathBuf>,
    /// Call the mock target in this process instead of a worker.
    #[arg(long, conflicts_with = "replay")]
    pub in_process: bool,
    /// Write every generated case to <dir>/<api>.jsonl.
    #[arg(long)]
    pub dump_cases: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FuzzArgs {
    #[arg(long)]
    pub constraints: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub campaign: CampaignArgs,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Report directory (or its campaign.json).
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    /// Where to write the budget sweep; defaults to <report>/budget_sweep.csv.
    #[arg(long)]
    pub sweep_csv: Option<PathBuf>,
    /// Sweep points; defaults to 1 and every multiple of 50 up to the budget.
    #[arg(long, value_delimiter = ',')]
    pub budgets: Vec<usize>,
}

#[derive(Debug, Args)]
pub struct ReproArgs {
    /// A bugs/<api>-<n>.json file.
    #[arg(long)]
    pub bug: PathBuf,
    #[command(flatten)]
    pub campaign: CampaignArgs,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    #[command(flatten)]
    pub docs: DocsInput,
    /// Directory for all stage artifacts (sigs.json, std_all.json, constraints.json, report/).
    #[arg(long)]
    pub workdir: PathBuf,
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[command(flatten)]
    pub llm: LlmArgs,
    #[command(flatten)]
    pub campaign: CampaignArgs,
}

fn init_logging(level: Option<&str>) {
    let filter = match level {
        Some(l) => EnvFilter::new(l),
        None => EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new("warn")),
    };
    let _ = tracing_subscriber::fmt()
        .json()
        .with_env_filter(filter)
        .with_writer(std::io::stderr)
        .try_init();
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let file_cfg = match config::PipelineConfig::load_opt(cli.config.as_deref()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    init_logging(cli.log_level.as_deref().or(file_cfg.log_level.as_deref()));
    match commands::run(cli, file_cfg) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            tracing::error!(error = %format!("{e:#}"), "aborted");
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
