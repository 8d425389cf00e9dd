//! Incompleteness transform: seeded removal of crucial (gold-path) triples.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{DomError, Result};
use crate::kg::{KnowledgeGraph, Triple};

/// Number of gold triples removed at `ratio`: round-half-up of `ratio * n`.
pub fn removal_count(distinct_gold: usize, ratio: f64) -> usize {
    (ratio * distinct_gold as f64).round() as usize
}

/// Remove `round(ratio * n)` of the `n` distinct gold-path triples from `g`,
/// chosen by a seeded shuffle. Returns the degraded graph and the removal set.
///
/// The shuffle permutes the sorted distinct gold list once and takes a prefix,
/// so for a fixed seed the removal set at a lower ratio is a subset of the set
/// at any higher ratio. Non-gold triples are never touched.
pub fn remove_crucial_triples(
    g: &KnowledgeGraph,
    gold_paths: &[Triple],
    ratio: f64,
    seed: u64,
) -> Result<(KnowledgeGraph, Vec<Triple>)> {
    if !(0.0..=1.0).contains(&ratio) {
        return Err(DomError::Config(format!(
            "removal ratio must lie in [0, 1], got {ratio}"
        )));
    }

    let mut distinct: Vec<Triple> = gold_paths.to_vec();
    distinct.sort();
    distinct.dedup();

    for t in &distinct {
        if !g.contains_triple(t) {
            return Err(DomError::Integrity(format!(
                "gold-path triple {t} is absent from the graph"
            )));
        }
    }

    let count = removal_count(distinct.len(), ratio);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    distinct.shuffle(&mut rng);
    let mut removed: Vec<Triple> = distinct.into_iter().take(count).collect();
    removed.sort();

    Ok((g.without_triples(&removed), removed))
}
