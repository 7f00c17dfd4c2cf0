//! Read-only serving of a corpus snapshot: the `/v1` JSON API and the Model
//! Context Protocol tool server. Both read through one [`ServiceState`].

use std::sync::{Arc, RwLock};

use legaldata_core::{build_index, coverage_stats, CorpusSnapshot, CoverageReport, Index, Tokenizer};

pub mod api;
pub mod mcp;
mod query;
mod serve;

pub use api::{handle_get_document, handle_search, handle_stats, router, ApiError, ApiResponse, VERSION_HEADER};
pub use mcp::{
    serve_stdio, McpServer, RpcError, Session, ToolDescriptor, ToolResult, DEFAULT_TRUNCATION_LIMIT, PROTOCOL_VERSION,
};
pub use query::{query_from_pairs, SEARCH_PARAMS};
pub use serve::serve_http;

/// One snapshot with everything derived from it.
#[derive(Debug)]
pub struct Served {
    pub index: Index,
    pub coverage: CoverageReport,
}

impl Served {
    pub fn new(snapshot: CorpusSnapshot, tokenizer: &Tokenizer) -> Self {
        let coverage = coverage_stats(&snapshot, tokenizer);
        Served { index: build_index(&snapshot), coverage }
    }

    pub fn snapshot(&self) -> &CorpusSnapshot {
        self.index.snapshot()
    }

    pub fn version(&self) -> u64 {
        self.index.version()
    }
}

/// The snapshot currently being served. Requests take an `Arc` to the
/// current [`Served`] and keep it for their whole lifetime, so a swap never
/// shows a request two versions.
#[derive(Debug)]
pub struct ServiceState {
    tokenizer: Tokenizer,
    current: RwLock<Arc<Served>>,
}

impl ServiceState {
    pub fn new(snapshot: CorpusSnapshot, tokenizer: Tokenizer) -> Self {
        let served = Served::new(snapshot, &tokenizer);
        ServiceState { tokenizer, current: RwLock::new(Arc::new(served)) }
    }

    pub fn current(&self) -> Arc<Served> {
        self.current.read().expect("state lock poisoned").clone()
    }

    pub fn version(&self) -> u64 {
        self.current().version()
    }

    /// Indexes `snapshot` and then swaps it in.
    pub fn replace(&self, snapshot: CorpusSnapshot) {
        let served = Arc::new(Served::new(snapshot, &self.tokenizer));
        *self.current.write().expect("state lock poisoned") = served;
    }
}
