//! Unstructured-knowledge layer: document corpus, token chunking, embeddings,
//! and exact top-k similarity search.

pub mod embed;
pub mod rank;

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{DomError, Result};

/// One article of the external corpus. Titles are typically entity names.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Document {
    pub doc_id: String,
    pub title: String,
    pub body: String,
}

/// A contiguous token window of one document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chunk {
    pub doc_id: String,
    pub ordinal: usize,
    pub text: String,
    pub token_count: usize,
}

/// Immutable document collection loaded from JSON Lines.
#[derive(Debug, Clone, Default)]
pub struct Corpus {
    documents: Vec<Document>,
}

impl Corpus {
    pub fn new(documents: Vec<Document>) -> Result<Self> {
        let mut seen = HashSet::new();
        for d in &documents {
            if !seen.insert(d.doc_id.clone()) {
                return Err(DomError::Integrity(format!(
                    "duplicate doc_id in corpus: {}",
                    d.doc_id
                )));
            }
        }
        Ok(Corpus { documents })
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }
}

/// Load a corpus from a JSONL file, one document object per line.
pub fn load_corpus(path: &Path) -> Result<Corpus> {
    let display = path.display().to_string();
    let body = fs::read_to_string(path).map_err(|e| DomError::io(&display, e))?;
    let mut documents = Vec::new();
    for (idx, line) in body.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let doc: Document = serde_json::from_str(line).map_err(|e| DomError::Parse {
            path: display.clone(),
            line: idx + 1,
            msg: e.to_string(),
        })?;
        documents.push(doc);
    }
    Corpus::new(documents)
}

/// Greedy fixed-size split over the whitespace token stream. Every chunk but
/// the last holds exactly `chunk_size` tokens; an empty body yields no chunks.
pub fn chunk(doc: &Document, chunk_size: usize) -> Vec<Chunk> {
    assert!(chunk_size >= 1, "chunk_size must be at least 1");
    let tokens: Vec<&str> = doc.body.split_whitespace().collect();
    tokens
        .chunks(chunk_size)
        .enumerate()
        .map(|(ordinal, window)| Chunk {
            doc_id: doc.doc_id.clone(),
            ordinal,
            text: window.join(" "),
            token_count: window.len(),
        })
        .collect()
}

#[cfg(test)]
mod tests;
