//! Content retrieval. Ingestion only sees the [`Fetcher`] trait, so tests
//! script responses and the CLI plugs in [`HttpFetcher`].

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::Mutex;
use std::time::Duration;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fetched {
    pub body: Vec<u8>,
    pub content_type: Option<String>,
}

impl Fetched {
    pub fn html(body: impl Into<String>) -> Self {
        Fetched { body: body.into().into_bytes(), content_type: Some("text/html; charset=utf-8".into()) }
    }

    pub fn text(body: impl Into<String>) -> Self {
        Fetched { body: body.into().into_bytes(), content_type: Some("text/plain; charset=utf-8".into()) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FetchError {
    #[error("timed out fetching {0}")]
    Timeout(String),
    #[error("{url} answered HTTP {status}")]
    Status { url: String, status: u16 },
    #[error("{url}: {message}")]
    Transport { url: String, message: String },
}

pub trait Fetcher: Sync {
    fn fetch(&self, url: &str) -> Result<Fetched, FetchError>;
}

const MAX_BODY_BYTES: u64 = 64 * 1024 * 1024;

fn content_type_for(path: &std::path::Path) -> Option<String> {
    let ext = path.extension()?.to_str()?.to_ascii_lowercase();
    Some(
        match ext.as_str() {
            "html" | "htm" => "text/html",
            "xml" => "application/xml",
            "rss" => "application/rss+xml",
            "atom" => "application/atom+xml",
            "pdf" => "application/pdf",
            _ => "text/plain",
        }
        .to_owned(),
    )
}

/// Reads `file://` URLs and bare paths.
#[derive(Debug, Clone, Copy, Default)]
pub struct FileFetcher;

impl FileFetcher {
    fn path(url: &str) -> Result<PathBuf, FetchError> {
        if url.starts_with("file:") {
            url::Url::parse(url)
                .ok()
                .and_then(|u| u.to_file_path().ok())
                .ok_or_else(|| FetchError::Transport { url: url.to_owned(), message: "not a usable file URL".into() })
        } else {
            Ok(PathBuf::from(url))
        }
    }
}

impl Fetcher for FileFetcher {
    fn fetch(&self, url: &str) -> Result<Fetched, FetchError> {
        let path = Self::path(url)?;
        let body =
            std::fs::read(&path).map_err(|e| FetchError::Transport { url: url.to_owned(), message: e.to_string() })?;
        Ok(Fetched { body, content_type: content_type_for(&path) })
    }
}

/// HTTP(S) through a shared agent; `file:` URLs and paths are read locally.
pub struct HttpFetcher {
    agent: ureq::Agent,
}

impl HttpFetcher {
    pub fn new(timeout: Duration) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .http_status_as_error(false)
            .user_agent(concat!("legaldata/", env!("CARGO_PKG_VERSION")))
            .build()
            .into();
        HttpFetcher { agent }
    }
}

impl Default for HttpFetcher {
    fn default() -> Self {
        HttpFetcher::new(Duration::from_secs(60))
    }
}

impl Fetcher for HttpFetcher {
    fn fetch(&self, url: &str) -> Result<Fetched, FetchError> {
        if !(url.starts_with("http://") || url.starts_with("https://")) {
            return FileFetcher.fetch(url);
        }
        let transport = |e: ureq::Error| match e {
            ureq::Error::Timeout(_) => FetchError::Timeout(url.to_owned()),
            other => FetchError::Transport { url: url.to_owned(), message: other.to_string() },
        };
        let mut response = self.agent.get(url).call().map_err(transport)?;
        let status = response.status().as_u16();
        if !(200..300).contains(&status) {
            return Err(FetchError::Status { url: url.to_owned(), status });
        }
        let content_type = response.headers().get("content-type").and_then(|v| v.to_str().ok()).map(str::to_owned);
        let body = response.body_mut().with_config().limit(MAX_BODY_BYTES).read_to_vec().map_err(transport)?;
        Ok(Fetched { body, content_type })
    }
}

/// Canned responses keyed by URL, for tests and dry runs. Unknown URLs fail
/// with a transport error. Every request is logged in order.
#[derive(Debug, Default)]
pub struct ScriptedFetcher {
    responses: HashMap<String, Result<Fetched, FetchError>>,
    log: Mutex<Vec<String>>,
}

impl ScriptedFetcher {
    pub fn new() -> Self {
        ScriptedFetcher::default()
    }

    pub fn respond(mut self, url: impl Into<String>, response: Result<Fetched, FetchError>) -> Self {
        self.responses.insert(url.into(), response);
        self
    }

    pub fn requests(&self) -> Vec<String> {
        self.log.lock().expect("fetch log poisoned").clone()
    }
}

impl Fetcher for ScriptedFetcher {
    fn fetch(&self, url: &str) -> Result<Fetched, FetchError> {
        self.log.lock().expect("fetch log poisoned").push(url.to_owned());
        self.responses.get(url).cloned().unwrap_or_else(|| {
            Err(FetchError::Transport { url: url.to_owned(), message: "no scripted response".into() })
        })
    }
}
