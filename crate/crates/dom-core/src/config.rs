//! Run configuration and backend selection specs.

use serde::{Deserialize, Serialize};

use crate::error::{DomError, Result};

/// Which retrieval agents participate in the debate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum AgentMode {
    #[default]
    Dual,
    KgOnly,
    RagOnly,
}

/// Pipeline knobs. Defaults: search depth 3, iteration cap 6, top-k 3,
/// 500-token chunks, 512-token completions, temperatures 0.4 / 0.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    /// Maximum KG exploration steps per sub-question (W).
    #[serde(alias = "w")]
    pub max_steps: usize,
    /// Maximum sub-question iterations (I).
    #[serde(alias = "i")]
    pub max_iterations: usize,
    /// Retrieval breadth: link candidates, relations kept, docs, chunks.
    pub top_k: usize,
    /// Chunk size in whitespace tokens.
    pub chunk_size: usize,
    /// Completion token cap per LLM call.
    pub max_tokens: u32,
    /// Sampling temperature for retrieval and exploration calls.
    pub explore_temperature: f32,
    /// Sampling temperature for final answer generation (verifier, final CoT).
    pub final_temperature: f32,
    pub seed: u64,
    pub agent_mode: AgentMode,
    /// Run the two agents on separate threads within an iteration.
    pub parallel_agents: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            max_steps: 3,
            max_iterations: 6,
            top_k: 3,
            chunk_size: 500,
            max_tokens: 512,
            explore_temperature: 0.4,
            final_temperature: 0.0,
            seed: 0,
            agent_mode: AgentMode::Dual,
            parallel_agents: true,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("max_steps", self.max_steps),
            ("max_iterations", self.max_iterations),
            ("top_k", self.top_k),
            ("chunk_size", self.chunk_size),
            ("max_tokens", self.max_tokens as usize),
        ] {
            if value < 1 {
                return Err(DomError::Config(format!("{name} must be at least 1")));
            }
        }
        Ok(())
    }

    /// Upper bound on provider calls for a full run with at most
    /// `mentions_per_iteration` topic mentions, assuming no reprompts:
    /// one plan call, per iteration one link and up to `max_steps` relation
    /// selections and inference calls per mention plus a unified inference
    /// call, one CoT fallback per agent, one text inference, one judge, and
    /// two finalize calls.
    pub fn max_llm_calls(&self, mentions_per_iteration: usize) -> usize {
        let m = mentions_per_iteration.max(1);
        let per_iteration = m + 2 * m * self.max_steps + 1 + 1 + 1 + 1 + 1;
        1 + self.max_iterations * per_iteration + 2
    }
}

/// LLM provider selection, usually from a config file or CLI flags.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProviderSpec {
    /// Canned per-role response queues from a JSON script file.
    Scripted { path: String },
    /// OpenAI-compatible chat-completions endpoint.
    Http {
        #[serde(default)]
        base_url: Option<String>,
        model: String,
        #[serde(default = "default_api_key_env")]
        api_key_env: String,
    },
}

fn default_api_key_env() -> String {
    "DOM_API_KEY".to_string()
}

/// Embedder selection.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EmbedderSpec {
    Hashing {
        #[serde(default = "default_dimension")]
        dimension: usize,
    },
    Remote {
        endpoint: String,
        model: String,
        #[serde(default = "default_api_key_env")]
        api_key_env: String,
        #[serde(default = "default_dimension")]
        dimension: usize,
    },
}

fn default_dimension() -> usize {
    256
}

impl Default for EmbedderSpec {
    fn default() -> Self {
        EmbedderSpec::Hashing { dimension: 256 }
    }
}
