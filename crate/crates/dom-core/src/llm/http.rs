//! Provider for OpenAI-compatible chat-completions endpoints.

use std::time::Duration;

use serde::Deserialize;

use crate::error::{DomError, Result};
use crate::llm::{LlmRequest, Provider, ProviderResponse, TokenUsage};

#[derive(Debug, Deserialize)]
struct ChatResponse {
    choices: Vec<Choice>,
    #[serde(default)]
    usage: Option<Usage>,
}

#[derive(Debug, Deserialize)]
struct Choice {
    message: Message,
}

#[derive(Debug, Deserialize)]
struct Message {
    content: Option<String>,
}

#[derive(Debug, Deserialize)]
struct Usage {
    prompt_tokens: u64,
    completion_tokens: u64,
}

/// Single-shot HTTP provider; the gateway supplies the retry loop.
pub struct HttpProvider {
    endpoint: String,
    model: String,
    api_key: Option<String>,
    client: reqwest::blocking::Client,
}

impl HttpProvider {
    pub fn new(
        base_url: impl Into<String>,
        model: impl Into<String>,
        api_key: Option<String>,
    ) -> Result<Self> {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(60))
            .build()
            .map_err(|e| DomError::Backend {
                msg: format!("failed to build http client: {e}"),
                status: None,
                retriable: false,
            })?;
        Ok(HttpProvider {
            endpoint: format!("{}/chat/completions", base_url.into().trim_end_matches('/')),
            model: model.into(),
            api_key,
            client,
        })
    }

    /// Read connection settings from the environment (`DOM_BASE_URL`, and the
    /// named api-key variable, `DOM_API_KEY` by default).
    pub fn from_env(model: impl Into<String>, api_key_env: &str) -> Result<Self> {
        let base_url = std::env::var("DOM_BASE_URL")
            .map_err(|_| DomError::Config("DOM_BASE_URL is not set".to_string()))?;
        let api_key = std::env::var(api_key_env).ok();
        Self::new(base_url, model, api_key)
    }
}

impl Provider for HttpProvider {
    fn complete(&self, request: &LlmRequest) -> Result<ProviderResponse> {
        let body = serde_json::json!({
            "model": self.model,
            "messages": [{"role": "user", "content": request.rendered_prompt}],
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
        });
        let mut req = self.client.post(&self.endpoint).json(&body);
        if let Some(key) = &self.api_key {
            req = req.bearer_auth(key);
        }
        let resp = req.send().map_err(|e| DomError::Backend {
            msg: format!("chat completion request failed: {e}"),
            status: None,
            retriable: true,
        })?;

        let status = resp.status();
        if !status.is_success() {
            let excerpt: String = resp
                .text()
                .unwrap_or_default()
                .chars()
                .take(200)
                .collect();
            return Err(DomError::Backend {
                msg: format!("chat completion rejected: {excerpt}"),
                status: Some(status.as_u16()),
                retriable: status.is_server_error(),
            });
        }

        let parsed: ChatResponse = resp.json().map_err(|e| DomError::Backend {
            msg: format!("malformed chat completion response: {e}"),
            status: None,
            retriable: false,
        })?;
        let text = parsed
            .choices
            .into_iter()
            .next()
            .and_then(|c| c.message.content)
            .ok_or_else(|| DomError::Backend {
                msg: "chat completion carried no choices".to_string(),
                status: None,
                retriable: false,
            })?;
        Ok(ProviderResponse {
            text,
            usage: parsed.usage.map(|u| TokenUsage {
                prompt_tokens: u.prompt_tokens,
                completion_tokens: u.completion_tokens,
            }),
        })
    }

    fn name(&self) -> &'static str {
        "http"
    }
}
