//! Question answering over incomplete knowledge graphs by debate between a
//! graph-exploration agent and a text-retrieval agent, arbitrated per
//! sub-question by a judge and consolidated from accumulated memory.
//!
//! The crate is organized around the pipeline's layers:
//!
//! - [`kg`] — triple store, SPARQL backend, incompleteness transform
//! - [`text`] — corpus, chunking, embeddings, top-k retrieval
//! - [`llm`] — role-based LLM gateway, providers, cost ledger
//! - [`agent`] — the two retrieval agents
//! - [`orchestrator`] — planning, debate loop, memory, final answer
//! - [`eval`] — datasets, incompleteness protocol, Hits@1 reports

pub mod agent;
pub mod clock;
pub mod config;
pub mod error;
pub mod eval;
pub mod kg;
pub mod llm;
pub mod orchestrator;
pub mod text;
pub mod trace;

pub use config::{AgentMode, EmbedderSpec, ProviderSpec, RunConfig};
pub use error::{DomError, Result};
