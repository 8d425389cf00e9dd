//! The two retrieval agents of the debate.

pub mod kg;
pub mod rag;
