//! Deterministic provider backed by per-role response queues.

use std::collections::{BTreeMap, VecDeque};
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::error::{DomError, Result};
use crate::llm::{LlmRequest, LlmRole, Provider, ProviderResponse};

/// Pops the next queued response for each call's role.
///
/// Script files are JSON objects mapping a queue key to a response list.
/// A key is a role name (`"judge"`), optionally qualified by the calling
/// agent (`"cot:kg"`, `"cot:rag"`). A qualified queue takes precedence for
/// calls from that agent, so scripts stay unambiguous when both agents fall
/// back to CoT in the same iteration.
///
/// Every queue has its own lock, so concurrent agents never contend on each
/// other's queues. Queue exhaustion is an error naming the role.
#[derive(Debug)]
pub struct ScriptedProvider {
    queues: BTreeMap<String, Mutex<VecDeque<String>>>,
    consumed: AtomicUsize,
    requests: Mutex<Vec<LlmRequest>>,
}

impl ScriptedProvider {
    pub fn new(script: BTreeMap<String, Vec<String>>) -> Result<Self> {
        for key in script.keys() {
            let role_part = key.split(':').next().unwrap_or(key);
            if LlmRole::from_str(role_part).is_none() {
                return Err(DomError::Config(format!("unknown role in script: {key}")));
            }
            if let Some((_, agent)) = key.split_once(':') {
                if agent != "kg" && agent != "rag" {
                    return Err(DomError::Config(format!(
                        "script key {key} must qualify by 'kg' or 'rag'"
                    )));
                }
            }
        }
        Ok(ScriptedProvider {
            queues: script
                .into_iter()
                .map(|(k, v)| (k, Mutex::new(VecDeque::from(v))))
                .collect(),
            consumed: AtomicUsize::new(0),
            requests: Mutex::new(Vec::new()),
        })
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let script: BTreeMap<String, Vec<String>> = serde_json::from_str(json)?;
        Self::new(script)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let body = std::fs::read_to_string(path)
            .map_err(|e| DomError::io(path.display().to_string(), e))?;
        Self::from_json(&body)
    }

    /// Responses handed out so far.
    pub fn consumed(&self) -> usize {
        self.consumed.load(Ordering::SeqCst)
    }

    /// Responses still queued across all roles.
    pub fn remaining(&self) -> usize {
        self.queues
            .values()
            .map(|q| q.lock().unwrap().len())
            .sum()
    }

    /// Every request seen, in arrival order. For temperature and budget
    /// assertions in tests.
    pub fn seen_requests(&self) -> Vec<LlmRequest> {
        self.requests.lock().unwrap().clone()
    }

    fn pop(&self, key: &str) -> Option<String> {
        let queue = self.queues.get(key)?;
        queue.lock().unwrap().pop_front()
    }
}

impl Provider for ScriptedProvider {
    fn complete(&self, request: &LlmRequest) -> Result<ProviderResponse> {
        self.requests.lock().unwrap().push(request.clone());
        let qualified = request
            .agent
            .map(|a| format!("{}:{}", request.role.as_str(), a.as_str()));
        let text = qualified
            .as_deref()
            .and_then(|k| self.pop(k))
            .or_else(|| self.pop(request.role.as_str()));
        match text {
            Some(text) => {
                self.consumed.fetch_add(1, Ordering::SeqCst);
                Ok(ProviderResponse { text, usage: None })
            }
            None => Err(DomError::ScriptExhausted { role: request.role }),
        }
    }

    fn name(&self) -> &'static str {
        "scripted"
    }
}
