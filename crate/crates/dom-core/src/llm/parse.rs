//! Line-oriented tagged output parsing, one schema per role.

use crate::error::{DomError, Result};
use crate::llm::LlmRole;

/// Parsed structured output of one role call.
#[derive(Debug, Clone, PartialEq)]
pub enum RoleOutput {
    /// Ordered sub-question texts; may be empty (callers degrade gracefully).
    Plan(Vec<String>),
    /// Selected candidate id, or None when all candidates were rejected.
    EntitySelect(Option<String>),
    /// Selected relation names, inverse markers preserved.
    Relations(Vec<String>),
    KgInference(KgInference),
    RagInference(SufficiencyAnswer),
    Judge(JudgeOutput),
    Verifier(SufficiencyAnswer),
    /// Free-form answer; the tagged line when present, else the whole text.
    Cot(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum KgInference {
    Sufficient { answer: String },
    Explore { next_entity: String },
}

#[derive(Debug, Clone, PartialEq)]
pub enum SufficiencyAnswer {
    Sufficient { answer: String },
    Insufficient,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JudgeOutput {
    pub answer: String,
    pub entities: Vec<String>,
    pub next_subquestion: Option<String>,
    pub done: bool,
}

/// Value of the first line tagged `TAG:` (tag match is case-insensitive,
/// values keep their case).
fn find_tag(text: &str, tag: &str) -> Option<String> {
    text.lines().find_map(|line| {
        let (head, value) = line.trim().split_once(':')?;
        head.trim()
            .eq_ignore_ascii_case(tag)
            .then(|| value.trim().to_string())
    })
}

fn collect_tags(text: &str, tag: &str) -> Vec<String> {
    text.lines()
        .filter_map(|line| {
            let (head, value) = line.trim().split_once(':')?;
            let value = value.trim();
            (head.trim().eq_ignore_ascii_case(tag) && !value.is_empty())
                .then(|| value.to_string())
        })
        .collect()
}

fn schema_err(role: LlmRole, msg: &str) -> DomError {
    DomError::Schema {
        role,
        msg: msg.to_string(),
    }
}

fn parse_yes_no(role: LlmRole, value: &str) -> Result<bool> {
    match value.to_ascii_lowercase().as_str() {
        "yes" => Ok(true),
        "no" => Ok(false),
        other => Err(schema_err(role, &format!("expected yes or no, got '{other}'"))),
    }
}

fn split_list(value: &str) -> Vec<String> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

fn require_sufficient(role: LlmRole, text: &str) -> Result<bool> {
    let value =
        find_tag(text, "SUFFICIENT").ok_or_else(|| schema_err(role, "missing SUFFICIENT line"))?;
    parse_yes_no(role, &value)
}

/// Parse raw provider text against the given role's output schema.
pub fn parse(role: LlmRole, text: &str) -> Result<RoleOutput> {
    match role {
        LlmRole::Plan => Ok(RoleOutput::Plan(collect_tags(text, "SUBQUESTION"))),

        LlmRole::EntitySelect => {
            let value = find_tag(text, "ENTITY")
                .ok_or_else(|| schema_err(role, "missing ENTITY line"))?;
            if value.is_empty() {
                return Err(schema_err(role, "empty ENTITY value"));
            }
            let selected = (!value.eq_ignore_ascii_case("none")).then_some(value);
            Ok(RoleOutput::EntitySelect(selected))
        }

        LlmRole::RelationSelect => {
            let value = find_tag(text, "RELATIONS")
                .ok_or_else(|| schema_err(role, "missing RELATIONS line"))?;
            let relations = split_list(&value);
            if relations.is_empty() {
                return Err(schema_err(role, "RELATIONS list is empty"));
            }
            Ok(RoleOutput::Relations(relations))
        }

        LlmRole::KgInference => {
            if require_sufficient(role, text)? {
                let answer = find_tag(text, "ANSWER")
                    .filter(|a| !a.is_empty())
                    .ok_or_else(|| schema_err(role, "sufficient but missing ANSWER"))?;
                Ok(RoleOutput::KgInference(KgInference::Sufficient { answer }))
            } else {
                let next_entity = find_tag(text, "NEXT_ENTITY")
                    .filter(|e| !e.is_empty())
                    .ok_or_else(|| schema_err(role, "insufficient but missing NEXT_ENTITY"))?;
                Ok(RoleOutput::KgInference(KgInference::Explore { next_entity }))
            }
        }

        LlmRole::RagInference | LlmRole::Verifier => {
            let out = if require_sufficient(role, text)? {
                let answer = find_tag(text, "ANSWER")
                    .filter(|a| !a.is_empty())
                    .ok_or_else(|| schema_err(role, "sufficient but missing ANSWER"))?;
                SufficiencyAnswer::Sufficient { answer }
            } else {
                SufficiencyAnswer::Insufficient
            };
            Ok(match role {
                LlmRole::RagInference => RoleOutput::RagInference(out),
                _ => RoleOutput::Verifier(out),
            })
        }

        LlmRole::Judge => {
            let answer = find_tag(text, "ANSWER")
                .filter(|a| !a.is_empty())
                .ok_or_else(|| schema_err(role, "missing ANSWER line"))?;
            let entities = find_tag(text, "ENTITIES").map(|v| split_list(&v)).unwrap_or_default();
            let done = match find_tag(text, "DONE") {
                Some(v) => parse_yes_no(role, &v)?,
                None => false,
            };
            // done means no further sub-question; it wins over NEXT_SUBQUESTION.
            let next_subquestion = if done {
                None
            } else {
                find_tag(text, "NEXT_SUBQUESTION").filter(|v| !v.is_empty())
            };
            Ok(RoleOutput::Judge(JudgeOutput {
                answer,
                entities,
                next_subquestion,
                done,
            }))
        }

        LlmRole::Cot => {
            let answer = find_tag(text, "ANSWER")
                .filter(|a| !a.is_empty())
                .unwrap_or_else(|| text.trim().to_string());
            Ok(RoleOutput::Cot(answer))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plan_collects_subquestions_in_order() {
        let out = parse(
            LlmRole::Plan,
            "SUBQUESTION: first\nnoise\nSUBQUESTION: second",
        )
        .unwrap();
        assert_eq!(
            out,
            RoleOutput::Plan(vec!["first".to_string(), "second".to_string()])
        );
    }

    #[test]
    fn plan_accepts_empty_output() {
        assert_eq!(parse(LlmRole::Plan, "no tags here").unwrap(), RoleOutput::Plan(vec![]));
    }

    #[test]
    fn entity_none_becomes_missing() {
        assert_eq!(
            parse(LlmRole::EntitySelect, "ENTITY: none").unwrap(),
            RoleOutput::EntitySelect(None)
        );
        assert_eq!(
            parse(LlmRole::EntitySelect, "entity: m.0ah").unwrap(),
            RoleOutput::EntitySelect(Some("m.0ah".to_string()))
        );
        assert!(parse(LlmRole::EntitySelect, "nothing").is_err());
    }

    #[test]
    fn relations_preserve_inverse_marker() {
        let out = parse(LlmRole::RelationSelect, "RELATIONS: a.b, ~c.d").unwrap();
        assert_eq!(
            out,
            RoleOutput::Relations(vec!["a.b".to_string(), "~c.d".to_string()])
        );
        assert!(parse(LlmRole::RelationSelect, "RELATIONS: ,").is_err());
    }

    #[test]
    fn kg_inference_two_branches() {
        assert_eq!(
            parse(LlmRole::KgInference, "SUFFICIENT: yes\nANSWER: x").unwrap(),
            RoleOutput::KgInference(KgInference::Sufficient { answer: "x".to_string() })
        );
        assert_eq!(
            parse(LlmRole::KgInference, "SUFFICIENT: no\nNEXT_ENTITY: m.1").unwrap(),
            RoleOutput::KgInference(KgInference::Explore { next_entity: "m.1".to_string() })
        );
        assert!(parse(LlmRole::KgInference, "SUFFICIENT: no").is_err());
        assert!(parse(LlmRole::KgInference, "SUFFICIENT: maybe").is_err());
    }

    #[test]
    fn judge_done_drops_next_subquestion() {
        let out = parse(
            LlmRole::Judge,
            "ANSWER: a\nENTITIES: x, y\nNEXT_SUBQUESTION: more?\nDONE: yes",
        )
        .unwrap();
        let RoleOutput::Judge(j) = out else { panic!() };
        assert!(j.done);
        assert_eq!(j.next_subquestion, None);
        assert_eq!(j.entities, vec!["x".to_string(), "y".to_string()]);
    }

    #[test]
    fn judge_defaults() {
        let RoleOutput::Judge(j) = parse(LlmRole::Judge, "ANSWER: a").unwrap() else {
            panic!()
        };
        assert!(!j.done);
        assert!(j.entities.is_empty());
        assert_eq!(j.next_subquestion, None);
    }

    #[test]
    fn cot_is_total() {
        assert_eq!(
            parse(LlmRole::Cot, "thinking...\nANSWER: 42").unwrap(),
            RoleOutput::Cot("42".to_string())
        );
        assert_eq!(
            parse(LlmRole::Cot, "just text").unwrap(),
            RoleOutput::Cot("just text".to_string())
        );
    }
}
