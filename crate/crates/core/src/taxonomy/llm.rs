//! Vendor-neutral chat-completion client and bounded retries.

use std::fmt;
use std::time::Duration;

use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LlmError {
    #[error("transport: {0}")]
    Transport(String),
    #[error("HTTP {status}: {body}")]
    Status { status: u16, body: String },
    #[error("unexpected response shape: {0}")]
    Shape(String),
}

/// Anything that turns a prompt into a reply.
pub trait LlmClient: Send + Sync {
    fn complete(&self, prompt: &str) -> Result<String, LlmError>;

    /// Model identifier recorded in reports.
    fn model(&self) -> &str;
}

/// OpenAI-style `POST {base}/chat/completions` client.
pub struct HttpLlmClient {
    base_url: String,
    model: String,
    api_key: Option<String>,
    agent: ureq::Agent,
}

impl fmt::Debug for HttpLlmClient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HttpLlmClient")
            .field("base_url", &self.base_url)
            .field("model", &self.model)
            .field("api_key", &self.api_key.as_ref().map(|_| "<redacted>"))
            .finish()
    }
}

impl HttpLlmClient {
    /// Default environment variable holding the API key.
    pub const KEY_ENV: &'static str = "AUDIT_LLM_API_KEY";

    pub fn new(base_url: &str, model: &str, api_key: Option<String>, timeout: Duration) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(timeout))
            .build()
            .into();
        Self { base_url: base_url.trim_end_matches('/').to_string(), model: model.to_string(), api_key, agent }
    }

    /// Reads the key from `env_var` (falls back to no key).
    pub fn from_env(base_url: &str, model: &str, env_var: &str, timeout: Duration) -> Self {
        Self::new(base_url, model, std::env::var(env_var).ok().filter(|k| !k.is_empty()), timeout)
    }

    fn redact(&self, s: &str) -> String {
        match &self.api_key {
            Some(k) if !k.is_empty() => s.replace(k.as_str(), "<redacted>"),
            _ => s.to_string(),
        }
    }
}

impl LlmClient for HttpLlmClient {
    fn complete(&self, prompt: &str) -> Result<String, LlmError> {
        let url = format!("{}/chat/completions", self.base_url);
        let body = json!({
            "model": self.model,
            "temperature": 0,
            "messages": [{"role": "user", "content": prompt}],
        });
        log::debug!("POST {url} request={}", self.redact(&body.to_string()));
        let mut req = self.agent.post(&url).header("Content-Type", "application/json");
        if let Some(k) = &self.api_key {
            req = req.header("Authorization", &format!("Bearer {k}"));
        }
        let mut resp = req.send(body.to_string()).map_err(|e| LlmError::Transport(self.redact(&e.to_string())))?;
        let status = resp.status().as_u16();
        let text = resp
            .body_mut()
            .read_to_string()
            .map_err(|e| LlmError::Transport(self.redact(&e.to_string())))?;
        log::debug!("response status={status} body={}", self.redact(&text));
        if !(200..300).contains(&status) {
            return Err(LlmError::Status { status, body: self.redact(&text) });
        }
        let v: Value = serde_json::from_str(&text).map_err(|e| LlmError::Shape(e.to_string()))?;
        v.pointer("/choices/0/message/content")
            .and_then(Value::as_str)
            .map(str::to_string)
            .ok_or_else(|| LlmError::Shape("missing choices[0].message.content".into()))
    }

    fn model(&self) -> &str {
        &self.model
    }
}

/// Outcome of a retried call.
pub(crate) enum Retried<T> {
    Ok(T),
    /// Every attempt returned something unparseable.
    Malformed(String),
    /// The last attempt failed in transport.
    Failed(String),
}

/// Calls the client up to `1 + retries` times until `parse` accepts a reply.
pub(crate) fn ask<T>(
    client: &dyn LlmClient,
    prompt: &str,
    retries: u32,
    parse: impl Fn(&str) -> Result<T, super::TaxonomyError>,
) -> Retried<T> {
    let mut last_malformed = None;
    let mut last_transport = None;
    for _ in 0..=retries {
        match client.complete(prompt) {
            Ok(reply) => match parse(&reply) {
                Ok(v) => return Retried::Ok(v),
                Err(e) => last_malformed = Some(e.to_string()),
            },
            Err(e) => last_transport = Some(e.to_string()),
        }
    }
    match (last_transport, last_malformed) {
        (Some(t), None) => Retried::Failed(t),
        (_, Some(m)) => Retried::Malformed(m),
        (None, None) => Retried::Failed("no attempt".into()),
    }
}
