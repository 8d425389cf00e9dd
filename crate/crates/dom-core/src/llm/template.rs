//! Prompt templates, shipped as text assets and rendered with `{{var}}`
//! substitution.

use std::collections::BTreeMap;

use crate::error::{DomError, Result};
use crate::llm::LlmRole;

pub fn template_for(role: LlmRole) -> &'static str {
    match role {
        LlmRole::Plan => include_str!("../../templates/plan.txt"),
        LlmRole::EntitySelect => include_str!("../../templates/entity_select.txt"),
        LlmRole::RelationSelect => include_str!("../../templates/relation_select.txt"),
        LlmRole::KgInference => include_str!("../../templates/kg_inference.txt"),
        LlmRole::RagInference => include_str!("../../templates/rag_inference.txt"),
        LlmRole::Judge => include_str!("../../templates/judge.txt"),
        LlmRole::Verifier => include_str!("../../templates/verifier.txt"),
        LlmRole::Cot => include_str!("../../templates/cot.txt"),
    }
}

/// One-line format reminder appended on a reprompt after unparseable output.
pub fn format_reminder(role: LlmRole) -> &'static str {
    match role {
        LlmRole::Plan => "REMINDER: reply only with lines of the form 'SUBQUESTION: <text>'.",
        LlmRole::EntitySelect => "REMINDER: reply with exactly one line 'ENTITY: <id or none>'.",
        LlmRole::RelationSelect => {
            "REMINDER: reply with exactly one line 'RELATIONS: <relation, relation, ...>' \
             using only relations from the presented list."
        }
        LlmRole::KgInference => {
            "REMINDER: reply 'SUFFICIENT: yes' plus 'ANSWER: <answer>', or 'SUFFICIENT: no' \
             plus 'NEXT_ENTITY: <entity from the facts>'."
        }
        LlmRole::RagInference => {
            "REMINDER: reply 'SUFFICIENT: yes' plus 'ANSWER: <answer>', or 'SUFFICIENT: no'."
        }
        LlmRole::Judge => "REMINDER: the reply must include a line 'ANSWER: <answer>'.",
        LlmRole::Verifier => {
            "REMINDER: reply 'SUFFICIENT: yes' plus 'ANSWER: <answer>', or 'SUFFICIENT: no'."
        }
        LlmRole::Cot => "REMINDER: end the reply with a line 'ANSWER: <answer>'.",
    }
}

/// Substitute every `{{key}}` placeholder. A placeholder with no matching
/// variable is an error (callers must supply all of them).
pub fn render(role: LlmRole, vars: &BTreeMap<String, String>) -> Result<String> {
    let mut text = template_for(role).to_string();
    for (key, value) in vars {
        text = text.replace(&format!("{{{{{key}}}}}"), value);
    }
    if let Some(start) = text.find("{{") {
        let rest = &text[start + 2..];
        let var = rest.split("}}").next().unwrap_or(rest).to_string();
        return Err(DomError::MissingTemplateVar { role, var });
    }
    Ok(text)
}
