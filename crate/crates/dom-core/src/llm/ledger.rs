//! Append-only accounting of every provider call.

use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::llm::{AgentTag, LlmRole};

/// One provider invocation. `estimated_usage` marks token counts derived from
/// whitespace word counts because the provider reported none.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CallRecord {
    pub call_id: u64,
    pub role: LlmRole,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub agent: Option<AgentTag>,
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
    pub wall_time_ms: u64,
    pub estimated_usage: bool,
}

/// Thread-safe append-only record sink shared by every concurrent caller.
#[derive(Debug, Default)]
pub struct CostLedger {
    records: Mutex<Vec<CallRecord>>,
}

impl CostLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn append(&self, record: CallRecord) {
        self.records.lock().unwrap().push(record);
    }

    pub fn len(&self) -> usize {
        self.records.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn snapshot(&self) -> Vec<CallRecord> {
        self.records.lock().unwrap().clone()
    }
}

/// Per-role aggregate in a [`LedgerReport`].
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct RoleTotals {
    pub role: LlmRole,
    pub calls: u64,
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
}

/// Summary totals; rows sorted by token count descending, role name ascending
/// on ties.
#[derive(Debug, Clone, Serialize, Deserialize, Default, PartialEq, Eq)]
pub struct LedgerReport {
    pub total_calls: u64,
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
    pub wall_time_ms: u64,
    pub by_role: Vec<RoleTotals>,
}

/// Aggregate a record list into totals plus a per-role breakdown.
pub fn ledger_report(records: &[CallRecord]) -> LedgerReport {
    let mut report = LedgerReport::default();
    let mut by_role: Vec<RoleTotals> = Vec::new();
    for r in records {
        report.total_calls += 1;
        report.prompt_tokens += r.prompt_tokens;
        report.completion_tokens += r.completion_tokens;
        report.wall_time_ms += r.wall_time_ms;
        match by_role.iter_mut().find(|t| t.role == r.role) {
            Some(t) => {
                t.calls += 1;
                t.prompt_tokens += r.prompt_tokens;
                t.completion_tokens += r.completion_tokens;
            }
            None => by_role.push(RoleTotals {
                role: r.role,
                calls: 1,
                prompt_tokens: r.prompt_tokens,
                completion_tokens: r.completion_tokens,
            }),
        }
    }
    by_role.sort_by(|a, b| {
        (b.prompt_tokens + b.completion_tokens)
            .cmp(&(a.prompt_tokens + a.completion_tokens))
            .then_with(|| a.role.as_str().cmp(b.role.as_str()))
    });
    report.by_role = by_role;
    report
}
