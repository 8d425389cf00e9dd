//! Exact cosine top-k ranking over candidate strings and documents.

use crate::error::Result;
use crate::text::embed::{cosine, Embedder};
use crate::text::{Corpus, Document};

/// A ranked candidate: original index plus cosine score.
#[derive(Debug, Clone, PartialEq)]
pub struct Ranked {
    pub index: usize,
    pub score: f32,
}

/// Rank `candidates` against `query` by cosine similarity, descending, ties
/// broken by candidate index ascending. Returns `min(k, |candidates|)` items.
pub fn top_k_similar(
    embedder: &dyn Embedder,
    query: &str,
    candidates: &[String],
    k: usize,
) -> Result<Vec<Ranked>> {
    assert!(k >= 1, "k must be at least 1");
    let query_vec = embedder.embed(query)?;
    let mut scored = Vec::with_capacity(candidates.len());
    for (index, candidate) in candidates.iter().enumerate() {
        let vec = embedder.embed(candidate)?;
        scored.push(Ranked {
            index,
            score: cosine(&query_vec, &vec),
        });
    }
    scored.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then_with(|| a.index.cmp(&b.index))
    });
    scored.truncate(k);
    Ok(scored)
}

/// Top-k documents whose titles best match an entity name. An empty corpus
/// yields an empty list; downstream falls back to internal inference.
pub fn retrieve_documents<'a>(
    embedder: &dyn Embedder,
    corpus: &'a Corpus,
    topic_entity_name: &str,
    k: usize,
) -> Result<Vec<&'a Document>> {
    if corpus.is_empty() {
        return Ok(Vec::new());
    }
    let titles: Vec<String> = corpus
        .documents()
        .iter()
        .map(|d| d.title.clone())
        .collect();
    let ranked = top_k_similar(embedder, topic_entity_name, &titles, k)?;
    Ok(ranked
        .into_iter()
        .map(|r| &corpus.documents()[r.index])
        .collect())
}
