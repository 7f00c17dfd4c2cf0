//! Classifier and summarizer backed by an external chat-completion endpoint.
//!
//! Configuration comes from the environment:
//!
//! | variable                  | meaning                                        |
//! |---------------------------|------------------------------------------------|
//! | `LEGALDATA_LLM_BASE_URL`  | base URL; `/chat/completions` is appended      |
//! | `LEGALDATA_LLM_API_KEY`   | sent as `Authorization: Bearer <key>`          |
//! | `LEGALDATA_LLM_MODEL`     | model name placed in the request body          |
//!
//! Request body: `{"model", "temperature": 0, "messages": [{"role", "content"}]}`.
//! The reply is read from `choices[0].message.content`.

use serde_json::{json, Value};

use super::digest::{CaseNotes, Classifier, DigestMemo, Outcome, Summarizer};
use super::AnalyticsError;
use crate::model::{DocumentRecord, Language};

pub const ENV_BASE_URL: &str = "LEGALDATA_LLM_BASE_URL";
pub const ENV_API_KEY: &str = "LEGALDATA_LLM_API_KEY";
pub const ENV_MODEL: &str = "LEGALDATA_LLM_MODEL";

/// Decision text sent to the model is cut to this many characters.
const PROMPT_TEXT_CHARS: usize = 24_000;

#[derive(Debug, Clone)]
pub struct ChatClient {
    base_url: String,
    api_key: String,
    model: String,
}

fn model_err(e: impl std::fmt::Display) -> AnalyticsError {
    AnalyticsError::Model(e.to_string())
}

impl ChatClient {
    pub fn new(base_url: impl Into<String>, api_key: impl Into<String>, model: impl Into<String>) -> Self {
        ChatClient { base_url: base_url.into(), api_key: api_key.into(), model: model.into() }
    }

    pub fn from_env() -> Result<Self, AnalyticsError> {
        let var = |name: &str| std::env::var(name).map_err(|_| AnalyticsError::Model(format!("{name} is not set")));
        Ok(ChatClient::new(var(ENV_BASE_URL)?, var(ENV_API_KEY)?, var(ENV_MODEL)?))
    }

    pub fn complete(&self, system: &str, user: &str) -> Result<String, AnalyticsError> {
        let url = format!("{}/chat/completions", self.base_url.trim_end_matches('/'));
        let body = json!({
            "model": self.model,
            "temperature": 0,
            "messages": [
                {"role": "system", "content": system},
                {"role": "user", "content": user},
            ],
        });
        let mut response = ureq::post(&url)
            .header("Authorization", &format!("Bearer {}", self.api_key))
            .send_json(&body)
            .map_err(model_err)?;
        let reply: Value = response.body_mut().read_json().map_err(model_err)?;
        reply["choices"][0]["message"]["content"]
            .as_str()
            .map(str::to_owned)
            .ok_or_else(|| AnalyticsError::Model("response has no choices[0].message.content".into()))
    }
}

fn decision_text(record: &DocumentRecord) -> String {
    let text = record.nonempty_text(Language::En).or(record.nonempty_text(Language::Fr)).unwrap_or("");
    text.chars().take(PROMPT_TEXT_CHARS).collect()
}

pub struct ModelClassifier {
    client: ChatClient,
}

impl ModelClassifier {
    pub fn new(client: ChatClient) -> Self {
        ModelClassifier { client }
    }
}

impl Classifier for ModelClassifier {
    fn name(&self) -> &str {
        "model"
    }

    fn classify(&self, record: &DocumentRecord) -> Result<Outcome, AnalyticsError> {
        let reply = self.client.complete(
            "You read Canadian court decisions. Answer with exactly one word: ALLOWED if the court \
             allowed the application or appeal (found a reviewable error), DISMISSED if it dismissed it, \
             OTHER otherwise.",
            &decision_text(record),
        )?;
        let word = reply.trim().trim_matches(|c: char| !c.is_alphabetic()).to_ascii_uppercase();
        Ok(match word.as_str() {
            "ALLOWED" => Outcome::Allowed,
            "DISMISSED" => Outcome::Dismissed,
            _ => Outcome::Other,
        })
    }
}

pub struct ModelSummarizer {
    client: ChatClient,
}

impl ModelSummarizer {
    pub fn new(client: ChatClient) -> Self {
        ModelSummarizer { client }
    }

    /// Free-form spoken script from the rendered memo.
    pub fn script(&self, memo: &DigestMemo) -> Result<String, AnalyticsError> {
        self.client.complete(
            "Turn this legal memorandum into a short podcast script for practitioners. Mention every \
             citation exactly once.",
            &memo.render(),
        )
    }
}

impl Summarizer for ModelSummarizer {
    fn name(&self) -> &str {
        "model"
    }

    fn summarize(&self, record: &DocumentRecord, outcome: Outcome) -> Result<CaseNotes, AnalyticsError> {
        let reply = self.client.complete(
            &format!(
                "Summarize this court decision (outcome: {}). Reply with a JSON object with string fields \
                 `category` (application type), `facts` (two sentences) and `errors` (the error the court \
                 identified, or an empty string).",
                outcome.label()
            ),
            &decision_text(record),
        )?;
        let start = reply.find('{').ok_or_else(|| model_err("reply is not a JSON object"))?;
        let end = reply.rfind('}').ok_or_else(|| model_err("reply is not a JSON object"))?;
        let v: Value = serde_json::from_str(&reply[start..=end]).map_err(model_err)?;
        let field = |k: &str| v[k].as_str().unwrap_or_default().trim().to_owned();
        Ok(CaseNotes { category: field("category"), facts: field("facts"), errors: field("errors") })
    }

    fn key_themes(&self, memo: &DigestMemo) -> Result<String, AnalyticsError> {
        if memo.summaries.is_empty() {
            return Ok(super::digest::NO_DECISIONS_NOTE.to_owned());
        }
        self.client.complete(
            "In one paragraph, state the key themes across these decision summaries, focusing on the \
             errors found in allowed cases.",
            &serde_json::to_string(&memo.summaries).map_err(model_err)?,
        )
    }
}
