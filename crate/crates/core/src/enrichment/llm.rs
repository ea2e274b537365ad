//! Optional language-model backend for signature-only APIs.
//!
//! The backend is never required: any failure (transport, malformed reply,
//! reply that does not validate) falls back to corpus inference.

use std::fmt;
use std::sync::Arc;
use std::time::Duration;

use serde::Serialize;

use crate::doc_parser::SignatureInfo;
use crate::schema::{self, StandardizedApiInfo};

/// Environment variable holding the bearer token for the HTTP backend.
pub const API_KEY_ENV: &str = "DOCFUZZ_LLM_KEY";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EnrichError {
    #[error("backend unavailable: {0}")]
    BackendUnavailable(String),
    #[error("invalid backend reply: {0}")]
    InvalidReply(String),
    #[error("backend endpoint is empty")]
    EmptyEndpoint,
}

/// Transport for completion requests. Implementations must be shareable
/// across threads.
pub trait LlmClient: Send + Sync {
    /// Sends `{model, prompt}` to `endpoint` and returns the reply body.
    fn complete(&self, endpoint: &str, model: &str, prompt: &str) -> Result<serde_json::Value, EnrichError>;
}

#[derive(Serialize)]
struct CompletionRequest<'a> {
    model: &'a str,
    prompt: &'a str,
}

/// Blocking HTTP client: POSTs JSON and expects a JSON reply.
#[derive(Debug, Clone)]
pub struct HttpLlmClient {
    timeout: Duration,
    api_key: Option<String>,
}

impl HttpLlmClient {
    pub fn new(timeout: Duration, api_key: Option<String>) -> Self {
        HttpLlmClient { timeout, api_key }
    }

    /// Reads the key from `DOCFUZZ_LLM_KEY` if set.
    pub fn from_env(timeout: Duration) -> Self {
        HttpLlmClient::new(timeout, std::env::var(API_KEY_ENV).ok().filter(|k| !k.is_empty()))
    }
}

impl LlmClient for HttpLlmClient {
    fn complete(&self, endpoint: &str, model: &str, prompt: &str) -> Result<serde_json::Value, EnrichError> {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(self.timeout))
            .build()
            .into();
        let mut req = agent.post(endpoint);
        if let Some(key) = &self.api_key {
            req = req.header("Authorization", format!("Bearer {key}"));
        }
        let resp = req
            .send_json(CompletionRequest { model, prompt })
            .map_err(|e| EnrichError::BackendUnavailable(e.to_string()))?;
        resp.into_body()
            .read_json()
            .map_err(|e| EnrichError::InvalidReply(e.to_string()))
    }
}

#[derive(Clone)]
pub struct LlmBackend {
    pub endpoint: String,
    pub model: String,
    /// Wraps the rendered prompt; `{prompt}` is replaced by it. Empty means
    /// the rendered prompt is sent as is.
    pub prompt_template: String,
    client: Arc<dyn LlmClient>,
}

impl fmt::Debug for LlmBackend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LlmBackend")
            .field("endpoint", &self.endpoint)
            .field("model", &self.model)
            .finish_non_exhaustive()
    }
}

impl LlmBackend {
    pub fn new(
        endpoint: impl Into<String>,
        model: impl Into<String>,
        prompt_template: impl Into<String>,
        client: Arc<dyn LlmClient>,
    ) -> Result<Self, EnrichError> {
        let endpoint = endpoint.into();
        if endpoint.trim().is_empty() {
            return Err(EnrichError::EmptyEndpoint);
        }
        Ok(LlmBackend {
            endpoint,
            model: model.into(),
            prompt_template: prompt_template.into(),
            client,
        })
    }

    pub fn http(endpoint: impl Into<String>, model: impl Into<String>, timeout: Duration) -> Result<Self, EnrichError> {
        LlmBackend::new(endpoint, model, "", Arc::new(HttpLlmClient::from_env(timeout)))
    }

    fn wrap(&self, prompt: &str) -> String {
        if self.prompt_template.is_empty() {
            prompt.to_string()
        } else {
            self.prompt_template.replace("{prompt}", prompt)
        }
    }

    /// Asks the backend for `sig`'s standardized info and checks the reply
    /// against the signature and the schema validator.
    pub fn request(
        &self,
        sig: &SignatureInfo,
        exemplars: &[StandardizedApiInfo],
    ) -> Result<StandardizedApiInfo, EnrichError> {
        let prompt = self.wrap(&render_llm_prompt(sig, exemplars));
        let reply = self.client.complete(&self.endpoint, &self.model, &prompt)?;
        let content = reply
            .get("content")
            .ok_or_else(|| EnrichError::InvalidReply("reply has no `content` field".into()))?;
        let text = match content {
            serde_json::Value::String(s) => s.clone(),
            other => other.to_string(),
        };
        let mut info = schema::from_json(&text).map_err(|e| EnrichError::InvalidReply(e.to_string()))?;
        if info.api_name != sig.api_name {
            return Err(EnrichError::InvalidReply(format!(
                "reply describes `{}`, expected `{}`",
                info.api_name, sig.api_name
            )));
        }
        let names: Vec<&str> = info.params.iter().map(|p| p.name.as_str()).collect();
        if names != sig.inputs.iter().map(String::as_str).collect::<Vec<_>>() {
            return Err(EnrichError::InvalidReply(format!(
                "reply parameters {names:?} differ from signature inputs {:?}",
                sig.inputs
            )));
        }
        let report = schema::validate(&info);
        if let Some(v) = report.first() {
            return Err(EnrichError::InvalidReply(format!("reply fails validation: {v}")));
        }
        info.provenance = schema::Provenance::Enriched;
        Ok(info)
    }
}

/// Renders the few-shot prompt for one signature. Deterministic for fixed inputs.
pub fn render_llm_prompt(sig: &SignatureInfo, exemplars: &[StandardizedApiInfo]) -> String {
    let mut out = String::new();
    out.push_str("## Input\n");
    out.push_str("Raw API documentation (signature only, no parameter descriptions):\n");
    out.push_str(&sig.to_string());
    out.push_str("\n\n## Task\n");
    out.push_str("1. Take the API name from the start of the signature.\n");
    out.push_str(
        "2. Split parameters into inputs and outputs: names after `->` and names in square brackets are outputs; \
         the remaining names in parentheses are inputs, in order.\n",
    );
    out.push_str(
        "3. Describe every input with `name`, `flag` (may it be mutated), `default`, `type_domain`, \
         `size_spec` and `description` (`raw_text`, `value_range`, `options`, `depends_on`), and give `output_count`.\n",
    );
    out.push_str(
        "4. Where the signature says nothing, reuse what similarly named parameters in the examples specify.\n",
    );
    if !exemplars.is_empty() {
        out.push_str("\n## Examples\n");
        for ex in exemplars {
            out.push_str("```json\n");
            out.push_str(&serde_json::to_string(ex).expect("IR values always serialize"));
            out.push_str("\n```\n");
        }
    }
    out.push_str("\n## Output\n");
    out.push_str(&format!(
        "One JSON object with fields api_name (\"{}\"), params, output_count and provenance (\"enriched\"). No prose.\n",
        sig.api_name
    ));
    out
}
