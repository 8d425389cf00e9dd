//! Embedding contract plus the two shipped implementations: a deterministic
//! offline character-trigram hasher and an HTTP client for remote embedding
//! endpoints.

use std::time::Duration;

use serde::Deserialize;

use crate::error::{DomError, Result};

/// Text encoder contract. Implementations must be deterministic per instance
/// and return L2-normalized vectors (the zero vector only for empty text).
pub trait Embedder: Send + Sync {
    fn embed(&self, text: &str) -> Result<Vec<f32>>;
    fn dimension(&self) -> usize;
}

/// Offline embedder: lowercased character 3-grams hashed into a fixed number
/// of count buckets, then L2-normalized. Deterministic across runs and
/// platforms (FNV-1a bucketing).
#[derive(Debug, Clone)]
pub struct HashingEmbedder {
    dimension: usize,
}

impl Default for HashingEmbedder {
    fn default() -> Self {
        HashingEmbedder { dimension: 256 }
    }
}

impl HashingEmbedder {
    pub fn new(dimension: usize) -> Self {
        assert!(dimension >= 1);
        HashingEmbedder { dimension }
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

impl Embedder for HashingEmbedder {
    fn embed(&self, text: &str) -> Result<Vec<f32>> {
        let mut values = vec![0.0f32; self.dimension];
        let lowered = text.to_lowercase();
        let chars: Vec<char> = lowered.chars().collect();
        if chars.is_empty() {
            return Ok(values);
        }
        let mut bump = |gram: &str| {
            let bucket = (fnv1a(gram.as_bytes()) % self.dimension as u64) as usize;
            values[bucket] += 1.0;
        };
        if chars.len() < 3 {
            bump(&lowered);
        } else {
            for window in chars.windows(3) {
                bump(&window.iter().collect::<String>());
            }
        }
        normalize(&mut values);
        Ok(values)
    }

    fn dimension(&self) -> usize {
        self.dimension
    }
}

pub(crate) fn normalize(values: &mut [f32]) {
    let norm = values.iter().map(|v| v * v).sum::<f32>().sqrt();
    if norm > 0.0 {
        for v in values.iter_mut() {
            *v /= norm;
        }
    }
}

/// Cosine similarity of two normalized vectors; 0.0 when either is zero.
pub fn cosine(a: &[f32], b: &[f32]) -> f32 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Debug, Deserialize)]
struct EmbeddingResponse {
    data: Vec<EmbeddingItem>,
}

#[derive(Debug, Deserialize)]
struct EmbeddingItem {
    embedding: Vec<f32>,
}

/// Client for an OpenAI-compatible `/embeddings` endpoint.
pub struct RemoteEmbedder {
    endpoint: String,
    model: String,
    api_key: Option<String>,
    dimension: usize,
    retries: u32,
    client: reqwest::blocking::Client,
}

impl RemoteEmbedder {
    pub fn new(
        endpoint: impl Into<String>,
        model: impl Into<String>,
        api_key: Option<String>,
        dimension: usize,
    ) -> Result<Self> {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(30))
            .build()
            .map_err(|e| DomError::Backend {
                msg: format!("failed to build http client: {e}"),
                status: None,
                retriable: false,
            })?;
        Ok(RemoteEmbedder {
            endpoint: endpoint.into(),
            model: model.into(),
            api_key,
            dimension,
            retries: 3,
            client,
        })
    }
}

impl Embedder for RemoteEmbedder {
    fn embed(&self, text: &str) -> Result<Vec<f32>> {
        if text.is_empty() {
            return Ok(vec![0.0; self.dimension]);
        }
        let mut last_err = None;
        for _ in 0..self.retries.max(1) {
            let mut req = self.client.post(&self.endpoint).json(&serde_json::json!({
                "model": self.model,
                "input": [text],
            }));
            if let Some(key) = &self.api_key {
                req = req.bearer_auth(key);
            }
            match req.send() {
                Ok(resp) => {
                    let status = resp.status();
                    if !status.is_success() {
                        return Err(DomError::Backend {
                            msg: "embedding endpoint returned an error".to_string(),
                            status: Some(status.as_u16()),
                            retriable: status.is_server_error(),
                        });
                    }
                    let parsed: EmbeddingResponse =
                        resp.json().map_err(|e| DomError::Backend {
                            msg: format!("malformed embedding response: {e}"),
                            status: None,
                            retriable: false,
                        })?;
                    let mut values = parsed
                        .data
                        .into_iter()
                        .next()
                        .map(|d| d.embedding)
                        .ok_or_else(|| DomError::Backend {
                            msg: "embedding response carried no vectors".to_string(),
                            status: None,
                            retriable: false,
                        })?;
                    normalize(&mut values);
                    return Ok(values);
                }
                Err(e) => {
                    last_err = Some(DomError::Backend {
                        msg: format!("embedding request failed: {e}"),
                        status: None,
                        retriable: true,
                    });
                }
            }
        }
        Err(last_err.unwrap_or(DomError::Backend {
            msg: "embedding request failed".to_string(),
            status: None,
            retriable: true,
        }))
    }

    fn dimension(&self) -> usize {
        self.dimension
    }
}
