//! The `legaldata` executable.
//!
//! Exit codes: 0 success, 1 operational failure, 2 usage error. Reports go
//! to stdout, or to `--out`.

use std::ffi::OsString;
use std::io::Write;
use std::net::SocketAddr;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub mod commands;
pub mod config;

use config::{CliConfig, ConfigFile, Overrides};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Aligned columns for reading.
    #[default]
    Table,
    /// Tab-separated values with a header row.
    Tsv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "legaldata", version, about = "Bilingual legal open-data corpus: ingest, serve, export, analyse")]
pub struct Cli {
    /// TOML config file; flags override its values.
    #[arg(long, global = true, env = "LEGALDATA_CONFIG")]
    pub config: Option<PathBuf>,
    /// Corpus directory (store files plus ingest bookkeeping).
    #[arg(long, global = true, env = "LEGALDATA_CORPUS")]
    pub corpus: Option<PathBuf>,
    /// Report format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Token counting scheme: word-fallback or bpe.
    #[arg(long, global = true)]
    pub tokenizer: Option<String>,
    /// BPE merge table (one "left right" pair per line), enables `--tokenizer bpe`.
    #[arg(long, global = true)]
    pub merges: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run sources from the registry once and store what they yield.
    Ingest(IngestArgs),
    /// Serve the read-only JSON API.
    ServeApi(ServeApiArgs),
    /// Serve the Model Context Protocol tools (stdio by default).
    ServeMcp(ServeMcpArgs),
    /// Write the corpus as Parquet files plus a dataset card.
    ExportParquet(DirArgs),
    /// Load Parquet files (ours or compatible third-party ones) into the store.
    ImportParquet(DirArgs),
    /// Per-dataset coverage: earliest and latest dates, documents, tokens.
    Stats,
    /// Median Flesch Reading Ease per year.
    Readability(ReadabilityArgs),
    /// Median English word count per judge.
    WordcountByJudge(JudgeArgs),
    /// English words per ISO week, with each year's median week.
    WeeklyVolume(VolumeArgs),
    /// Weekly memorandum of decisions, optionally with a podcast script.
    Digest(DigestArgs),
    /// Check every stored record (and the registry, if configured).
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Source registry (TOML).
    #[arg(long)]
    pub registry: Option<PathBuf>,
    /// Only run sources for these datasets.
    #[arg(long = "source", value_name = "DATASET")]
    pub sources: Vec<String>,
    /// Only run sources on these channels (listing-scrape, rss, law-repo-sync, file-drop).
    #[arg(long = "channel", value_name = "CHANNEL")]
    pub channels: Vec<String>,
    /// Seconds between fetches to one host, overriding each source's delay.
    #[arg(long)]
    pub politeness_delay: Option<f64>,
    /// Per-request timeout in seconds.
    #[arg(long)]
    pub fetch_timeout: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ServeApiArgs {
    #[arg(long)]
    pub listen: Option<SocketAddr>,
    /// Seconds between checks for a newer corpus version (0 disables).
    #[arg(long, default_value_t = 60)]
    pub reload_secs: u64,
}

#[derive(Debug, Args)]
pub struct ServeMcpArgs {
    /// Serve over HTTP (POST /mcp) on this address instead of stdio.
    #[arg(long)]
    pub listen: Option<SocketAddr>,
    /// Characters of document text per response before truncating.
    #[arg(long)]
    pub truncation_limit: Option<usize>,
    /// Seconds between checks for a newer corpus version (0 disables).
    #[arg(long, default_value_t = 60)]
    pub reload_secs: u64,
}

#[derive(Debug, Args)]
pub struct DirArgs {
    /// Directory holding cases/ and laws/ Parquet files.
    pub dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReadabilityArgs {
    #[arg(long)]
    pub dataset: String,
    /// First year (default: earliest dated decision).
    #[arg(long)]
    pub from_year: Option<i32>,
    /// Last year (default: latest dated decision).
    #[arg(long)]
    pub to_year: Option<i32>,
}

#[derive(Debug, Args)]
pub struct JudgeArgs {
    #[arg(long)]
    pub dataset: String,
    /// all or immigration.
    #[arg(long, default_value = "all")]
    pub topic: String,
    /// Earliest decision date (YYYY-MM-DD).
    #[arg(long)]
    pub from: Option<chrono::NaiveDate>,
    /// Latest decision date (YYYY-MM-DD).
    #[arg(long)]
    pub to: Option<chrono::NaiveDate>,
    /// Show only the N lowest and N highest judges.
    #[arg(long)]
    pub extremes: Option<usize>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
pub enum VolumeView {
    #[default]
    Weeks,
    Years,
}

#[derive(Debug, Args)]
pub struct VolumeArgs {
    #[arg(long)]
    pub dataset: String,
    #[arg(long, default_value = "all")]
    pub topic: String,
    /// Rows for tsv output: per week or per year.
    #[arg(long, value_enum, default_value_t = VolumeView::Weeks)]
    pub view: VolumeView,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
pub enum Model {
    /// Keyword classifier and template summarizer (deterministic).
    #[default]
    Builtin,
    /// Chat-completion model configured through LEGALDATA_LLM_* variables.
    Remote,
}

#[derive(Debug, Args)]
pub struct DigestArgs {
    #[arg(long)]
    pub dataset: String,
    /// ISO week, e.g. 2025-W32.
    #[arg(long)]
    pub week: String,
    #[arg(long, default_value = "all")]
    pub topic: String,
    /// Also produce the podcast script.
    #[arg(long)]
    pub script: bool,
    /// Where the script goes (default: next to --out as <stem>.script.txt).
    #[arg(long)]
    pub script_out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Model::Builtin)]
    pub model: Model,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Source registry to check as well.
    #[arg(long)]
    pub registry: Option<PathBuf>,
}

/// Global options shared by every command.
pub struct Context<'a> {
    pub config: CliConfig,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub stdout: &'a mut dyn Write,
    pub stderr: &'a mut dyn Write,
}

impl Context<'_> {
    /// Writes a report to `--out` or stdout.
    pub fn emit(&mut self, report: &str) -> anyhow::Result<()> {
        match &self.out {
            Some(path) => std::fs::write(path, report).map_err(|e| anyhow::anyhow!("writing {}: {e}", path.display())),
            None => Ok(self.stdout.write_all(report.as_bytes())?),
        }
    }
}

fn overrides(cli: &Cli) -> Overrides {
    let mut o = Overrides {
        corpus: cli.corpus.clone(),
        tokenizer: cli.tokenizer.clone(),
        merges: cli.merges.clone(),
        ..Default::default()
    };
    match &cli.command {
        Command::Ingest(a) => {
            o.registry = a.registry.clone();
            o.politeness_delay = a.politeness_delay;
            o.fetch_timeout = a.fetch_timeout;
        }
        Command::ServeApi(a) => o.api_listen = a.listen,
        Command::ServeMcp(a) => {
            o.mcp_listen = a.listen;
            o.truncation_limit = a.truncation_limit;
        }
        Command::Validate(a) => o.registry = a.registry.clone(),
        _ => {}
    }
    o
}

/// Parses `argv` and runs the command; returns the process exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            let _ =
                if code == 0 { stdout.write_all(rendered.as_bytes()) } else { stderr.write_all(rendered.as_bytes()) };
            return if code == 0 { 0 } else { 2 };
        }
    };
    let result = (|| {
        let file = match &cli.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        let config = CliConfig::resolve(file, overrides(&cli))?;
        let mut ctx = Context {
            config,
            format: cli.format.unwrap_or_default(),
            out: cli.out.clone(),
            stdout: &mut *stdout,
            stderr: &mut *stderr,
        };
        commands::dispatch(&cli.command, &mut ctx)
    })();
    match result {
        Ok(commands::Status::Ok) => 0,
        Ok(commands::Status::Failed) => 1,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e:#}");
            1
        }
    }
}
