//! Uniform LLM-call layer: one prompt template and output schema per role,
//! role-appropriate sampling, bounded retries, one format reprompt, and
//! ledger/trace records for every provider invocation.

pub mod http;
pub mod ledger;
pub mod parse;
pub mod scripted;
pub mod template;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::Result;
use crate::trace::RunLog;
pub use parse::{JudgeOutput, KgInference, RoleOutput, SufficiencyAnswer};

/// The task a call performs; fixes its template, schema, and sampling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LlmRole {
    Plan,
    EntitySelect,
    RelationSelect,
    KgInference,
    RagInference,
    Judge,
    Verifier,
    Cot,
}

impl LlmRole {
    pub const ALL: [LlmRole; 8] = [
        LlmRole::Plan,
        LlmRole::EntitySelect,
        LlmRole::RelationSelect,
        LlmRole::KgInference,
        LlmRole::RagInference,
        LlmRole::Judge,
        LlmRole::Verifier,
        LlmRole::Cot,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            LlmRole::Plan => "plan",
            LlmRole::EntitySelect => "entity_select",
            LlmRole::RelationSelect => "relation_select",
            LlmRole::KgInference => "kg_inference",
            LlmRole::RagInference => "rag_inference",
            LlmRole::Judge => "judge",
            LlmRole::Verifier => "verifier",
            LlmRole::Cot => "cot",
        }
    }

    pub fn from_str(s: &str) -> Option<LlmRole> {
        LlmRole::ALL.into_iter().find(|r| r.as_str() == s)
    }
}

impl fmt::Display for LlmRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which agent issued a call; scripts may key CoT queues on this.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgentTag {
    Kg,
    Rag,
}

impl AgentTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            AgentTag::Kg => "kg",
            AgentTag::Rag => "rag",
        }
    }
}

/// A fully rendered request as handed to a provider.
#[derive(Debug, Clone)]
pub struct LlmRequest {
    pub role: LlmRole,
    pub agent: Option<AgentTag>,
    pub rendered_prompt: String,
    pub temperature: f32,
    pub max_tokens: u32,
}

#[derive(Debug, Clone, Copy)]
pub struct TokenUsage {
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
}

#[derive(Debug, Clone)]
pub struct ProviderResponse {
    pub text: String,
    /// None when the provider reports no usage; tokens are then estimated.
    pub usage: Option<TokenUsage>,
}

/// Completion backend. Implementations must be callable from concurrent
/// agents.
pub trait Provider: Send + Sync {
    fn complete(&self, request: &LlmRequest) -> Result<ProviderResponse>;
    fn name(&self) -> &str;
}

/// Distinguishes mid-pipeline CoT fallbacks (exploration temperature) from
/// the final-answer CoT (deterministic temperature).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CotStage {
    Inference,
    Final,
}

/// Sampling parameters, two-level: everything explores at one temperature,
/// final answer generation runs at the other (default 0).
#[derive(Debug, Clone, Copy)]
pub struct Sampling {
    pub explore_temperature: f32,
    pub final_temperature: f32,
    pub max_tokens: u32,
}

impl Sampling {
    pub fn from_config(config: &RunConfig) -> Self {
        Sampling {
            explore_temperature: config.explore_temperature,
            final_temperature: config.final_temperature,
            max_tokens: config.max_tokens,
        }
    }
}

/// The temperature every request of this role must carry. Total over roles.
pub fn expected_temperature(role: LlmRole, stage: CotStage, sampling: &Sampling) -> f32 {
    match (role, stage) {
        (LlmRole::Verifier, _) | (LlmRole::Cot, CotStage::Final) => sampling.final_temperature,
        _ => sampling.explore_temperature,
    }
}

const PROVIDER_ATTEMPTS: u32 = 3;

/// Renders, invokes, retries, parses, and accounts for every role call.
pub struct Gateway {
    provider: Arc<dyn Provider>,
    log: Arc<RunLog>,
    sampling: Sampling,
}

impl Gateway {
    pub fn new(provider: Arc<dyn Provider>, log: Arc<RunLog>, sampling: Sampling) -> Self {
        Gateway {
            provider,
            log,
            sampling,
        }
    }

    /// Same provider and sampling, different sink. Agents run against
    /// private logs that the orchestrator merges deterministically.
    pub fn with_log(&self, log: Arc<RunLog>) -> Gateway {
        Gateway {
            provider: Arc::clone(&self.provider),
            log,
            sampling: self.sampling,
        }
    }

    pub fn log(&self) -> &Arc<RunLog> {
        &self.log
    }

    /// Call a role with its default sampling. CoT calls made during
    /// inference go through here; the final CoT uses [`Gateway::call_final_cot`].
    pub fn call(
        &self,
        role: LlmRole,
        agent: Option<AgentTag>,
        vars: &BTreeMap<String, String>,
    ) -> Result<RoleOutput> {
        let temperature = expected_temperature(role, CotStage::Inference, &self.sampling);
        self.call_at(role, agent, vars, temperature)
    }

    /// The final-answer CoT call (deterministic temperature).
    pub fn call_final_cot(&self, vars: &BTreeMap<String, String>) -> Result<RoleOutput> {
        let temperature = expected_temperature(LlmRole::Cot, CotStage::Final, &self.sampling);
        self.call_at(LlmRole::Cot, None, vars, temperature)
    }

    fn call_at(
        &self,
        role: LlmRole,
        agent: Option<AgentTag>,
        vars: &BTreeMap<String, String>,
        temperature: f32,
    ) -> Result<RoleOutput> {
        let prompt = template::render(role, vars)?;
        let text = self.invoke(role, agent, &prompt, temperature)?;
        match parse::parse(role, &text) {
            Ok(out) => Ok(out),
            Err(first) => {
                self.log.event(
                    "llm",
                    "reprompt",
                    serde_json::json!({ "role": role.as_str(), "error": first.to_string() }),
                );
                let reprompt = format!("{prompt}\n\n{}", template::format_reminder(role));
                let text = self.invoke(role, agent, &reprompt, temperature)?;
                parse::parse(role, &text)
            }
        }
    }

    fn invoke(
        &self,
        role: LlmRole,
        agent: Option<AgentTag>,
        prompt: &str,
        temperature: f32,
    ) -> Result<String> {
        let request = LlmRequest {
            role,
            agent,
            rendered_prompt: prompt.to_string(),
            temperature,
            max_tokens: self.sampling.max_tokens,
        };
        for attempt in 1..=PROVIDER_ATTEMPTS {
            let started = self.log.clock().now_ms();
            match self.provider.complete(&request) {
                Ok(resp) => {
                    let elapsed = self.log.clock().now_ms().saturating_sub(started);
                    let (prompt_tokens, completion_tokens, estimated) = match resp.usage {
                        Some(u) => (u.prompt_tokens, u.completion_tokens, false),
                        None => (word_count(prompt), word_count(&resp.text), true),
                    };
                    self.log.llm_call(
                        role,
                        agent,
                        prompt_tokens,
                        completion_tokens,
                        estimated,
                        elapsed,
                        &resp.text,
                    );
                    return Ok(resp.text);
                }
                Err(e) if e.is_retriable() && attempt < PROVIDER_ATTEMPTS => {
                    self.log.event(
                        "llm",
                        "retry",
                        serde_json::json!({
                            "role": role.as_str(),
                            "attempt": attempt,
                            "error": e.to_string(),
                        }),
                    );
                }
                Err(e) => return Err(e),
            }
        }
        unreachable!("retry loop always returns");
    }
}

fn word_count(text: &str) -> u64 {
    text.split_whitespace().count() as u64
}

/// Convenience for building template variable maps.
pub fn vars<const N: usize>(pairs: [(&str, String); N]) -> BTreeMap<String, String> {
    pairs
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
}
