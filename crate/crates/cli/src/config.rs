//! Optional TOML config file; command-line flags override it.
//!
//! ```toml
//! corpus = "/srv/legaldata/corpus"
//! registry = "sources.toml"          # relative paths resolve against this file
//! api_listen = "127.0.0.1:8080"
//! mcp_listen = "127.0.0.1:8081"
//! tokenizer = "bpe"
//! merges = "merges.txt"
//! truncation_limit = 20000
//! politeness_delay = 1.0
//! fetch_timeout = 30.0
//! ```

use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use legaldata_core::{MergeTable, Tokenizer, TokenizerRegistry};
use legaldata_service::DEFAULT_TRUNCATION_LIMIT;
use serde::Deserialize;

pub const DEFAULT_API_LISTEN: &str = "127.0.0.1:8080";
pub const DEFAULT_MCP_LISTEN: &str = "127.0.0.1:8081";
pub const DEFAULT_FETCH_TIMEOUT: f64 = 30.0;

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub corpus: Option<PathBuf>,
    pub registry: Option<PathBuf>,
    pub api_listen: Option<SocketAddr>,
    pub mcp_listen: Option<SocketAddr>,
    pub tokenizer: Option<String>,
    pub merges: Option<PathBuf>,
    pub truncation_limit: Option<usize>,
    pub politeness_delay: Option<f64>,
    pub fetch_timeout: Option<f64>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let mut file: ConfigFile =
            toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [&mut file.corpus, &mut file.registry, &mut file.merges].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(file)
    }
}

/// Settings after merging flags over the config file.
#[derive(Debug, Clone, PartialEq)]
pub struct CliConfig {
    pub corpus: PathBuf,
    pub registry: Option<PathBuf>,
    pub api_listen: SocketAddr,
    pub mcp_listen: SocketAddr,
    pub tokenizer: String,
    pub merges: Option<PathBuf>,
    pub truncation_limit: usize,
    pub politeness_delay: Option<f64>,
    pub fetch_timeout: f64,
}

/// Flag values that can override the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub corpus: Option<PathBuf>,
    pub registry: Option<PathBuf>,
    pub api_listen: Option<SocketAddr>,
    pub mcp_listen: Option<SocketAddr>,
    pub tokenizer: Option<String>,
    pub merges: Option<PathBuf>,
    pub truncation_limit: Option<usize>,
    pub politeness_delay: Option<f64>,
    pub fetch_timeout: Option<f64>,
}

impl CliConfig {
    pub fn resolve(file: ConfigFile, flags: Overrides) -> Result<Self> {
        let Some(corpus) = flags.corpus.or(file.corpus) else {
            bail!("no corpus directory: pass --corpus, set LEGALDATA_CORPUS, or set `corpus` in the config file");
        };
        let cfg = CliConfig {
            corpus,
            registry: flags.registry.or(file.registry),
            api_listen: flags
                .api_listen
                .or(file.api_listen)
                .unwrap_or_else(|| DEFAULT_API_LISTEN.parse().expect("default")),
            mcp_listen: flags
                .mcp_listen
                .or(file.mcp_listen)
                .unwrap_or_else(|| DEFAULT_MCP_LISTEN.parse().expect("default")),
            tokenizer: flags
                .tokenizer
                .or(file.tokenizer)
                .unwrap_or_else(|| legaldata_core::tokenizer::WORD_FALLBACK.to_owned()),
            merges: flags.merges.or(file.merges),
            truncation_limit: flags.truncation_limit.or(file.truncation_limit).unwrap_or(DEFAULT_TRUNCATION_LIMIT),
            politeness_delay: flags.politeness_delay.or(file.politeness_delay),
            fetch_timeout: flags.fetch_timeout.or(file.fetch_timeout).unwrap_or(DEFAULT_FETCH_TIMEOUT),
        };
        if cfg.truncation_limit == 0 {
            bail!("truncation limit must be at least 1");
        }
        if cfg.politeness_delay.is_some_and(|d| d.is_nan() || d < 0.0) {
            bail!("politeness delay must be a non-negative number of seconds");
        }
        if cfg.fetch_timeout.is_nan() || cfg.fetch_timeout <= 0.0 {
            bail!("fetch timeout must be positive");
        }
        Ok(cfg)
    }

    pub fn tokenizer(&self) -> Result<Tokenizer> {
        let mut registry = TokenizerRegistry::default();
        if let Some(path) = &self.merges {
            let text =
                std::fs::read_to_string(path).with_context(|| format!("reading merge table {}", path.display()))?;
            let merges = MergeTable::parse(&text).with_context(|| format!("parsing merge table {}", path.display()))?;
            let label = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
            registry = registry.with_bpe(label, merges);
        }
        Ok(registry.get(&self.tokenizer)?.clone())
    }
}
