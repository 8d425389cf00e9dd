//! Run trace: strictly ordered events, one `llm_call` event per ledger
//! record, JSON Lines on disk.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::clock::Clock;
use crate::llm::ledger::{ledger_report, CallRecord, CostLedger, LedgerReport};
use crate::llm::{AgentTag, LlmRole};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceEvent {
    pub ts: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iteration: Option<usize>,
    pub module: String,
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub call_id: Option<u64>,
    pub payload: serde_json::Value,
}

/// Shared sink for ledger records and trace events for one pipeline run.
///
/// Each agent task writes to its own private `RunLog`; the orchestrator merges
/// the private logs in a fixed order after both complete, reassigning call ids
/// sequentially. That keeps traces byte-identical across runs even when the
/// agents execute in parallel.
pub struct RunLog {
    clock: Arc<dyn Clock>,
    ledger: CostLedger,
    events: Mutex<Vec<TraceEvent>>,
    next_id: AtomicU64,
    iteration: Mutex<Option<usize>>,
}

impl RunLog {
    pub fn new(clock: Arc<dyn Clock>) -> Self {
        RunLog {
            clock,
            ledger: CostLedger::new(),
            events: Mutex::new(Vec::new()),
            next_id: AtomicU64::new(0),
            iteration: Mutex::new(None),
        }
    }

    pub fn clock(&self) -> &Arc<dyn Clock> {
        &self.clock
    }

    pub fn set_iteration(&self, iteration: Option<usize>) {
        *self.iteration.lock().unwrap() = iteration;
    }

    fn current_iteration(&self) -> Option<usize> {
        *self.iteration.lock().unwrap()
    }

    /// Record a completed provider call: one ledger record plus its paired
    /// trace event. Returns the call id.
    #[allow(clippy::too_many_arguments)]
    pub fn llm_call(
        &self,
        role: LlmRole,
        agent: Option<AgentTag>,
        prompt_tokens: u64,
        completion_tokens: u64,
        estimated_usage: bool,
        wall_time_ms: u64,
        response_excerpt: &str,
    ) -> u64 {
        let call_id = self.next_id.fetch_add(1, Ordering::SeqCst);
        self.ledger.append(CallRecord {
            call_id,
            role,
            agent,
            prompt_tokens,
            completion_tokens,
            wall_time_ms,
            estimated_usage,
        });
        self.push_event(TraceEvent {
            ts: self.clock.now_ms(),
            iteration: self.current_iteration(),
            module: "llm".to_string(),
            kind: "llm_call".to_string(),
            call_id: Some(call_id),
            payload: serde_json::json!({
                "role": role.as_str(),
                "agent": agent.map(|a| a.as_str()),
                "prompt_tokens": prompt_tokens,
                "completion_tokens": completion_tokens,
                "estimated_usage": estimated_usage,
                "response_excerpt": excerpt(response_excerpt),
            }),
        });
        call_id
    }

    /// Record a non-call event.
    pub fn event(&self, module: &str, kind: &str, payload: serde_json::Value) {
        self.push_event(TraceEvent {
            ts: self.clock.now_ms(),
            iteration: self.current_iteration(),
            module: module.to_string(),
            kind: kind.to_string(),
            call_id: None,
            payload,
        });
    }

    fn push_event(&self, event: TraceEvent) {
        self.events.lock().unwrap().push(event);
    }

    /// Drain `other` into this log in its recorded order, reassigning call
    /// ids from this log's sequence.
    pub fn merge(&self, other: &RunLog) {
        let records = {
            let mut snapshot = other.ledger.snapshot();
            snapshot.sort_by_key(|r| r.call_id);
            snapshot
        };
        let events: Vec<TraceEvent> = std::mem::take(&mut *other.events.lock().unwrap());
        let iteration = self.current_iteration();
        let mut id_map = std::collections::HashMap::new();
        for mut record in records {
            let new_id = self.next_id.fetch_add(1, Ordering::SeqCst);
            id_map.insert(record.call_id, new_id);
            record.call_id = new_id;
            self.ledger.append(record);
        }
        for mut e in events {
            if let Some(old) = e.call_id {
                e.call_id = id_map.get(&old).copied();
            }
            e.iteration = iteration;
            e.ts = self.clock.now_ms();
            self.push_event(e);
        }
    }

    pub fn ledger_records(&self) -> Vec<CallRecord> {
        self.ledger.snapshot()
    }

    pub fn ledger_report(&self) -> LedgerReport {
        ledger_report(&self.ledger.snapshot())
    }

    pub fn events(&self) -> Vec<TraceEvent> {
        self.events.lock().unwrap().clone()
    }

    /// Serialize all events as JSON Lines.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for e in self.events() {
            out.push_str(&serde_json::to_string(&e).expect("trace events serialize"));
            out.push('\n');
        }
        out
    }
}

fn excerpt(text: &str) -> String {
    const LIMIT: usize = 200;
    if text.chars().count() <= LIMIT {
        text.to_string()
    } else {
        let cut: String = text.chars().take(LIMIT).collect();
        format!("{cut}…")
    }
}
