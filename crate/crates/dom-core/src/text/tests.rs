use proptest::prelude::*;

use super::embed::{cosine, Embedder, HashingEmbedder};
use super::rank::{retrieve_documents, top_k_similar, Ranked};
use super::*;

fn doc(id: &str, title: &str, body: &str) -> Document {
    Document {
        doc_id: id.to_string(),
        title: title.to_string(),
        body: body.to_string(),
    }
}

fn words(n: usize) -> String {
    (0..n).map(|i| format!("w{i}")).collect::<Vec<_>>().join(" ")
}

#[test]
fn chunk_sizes_are_greedy() {
    let d = doc("d", "t", &words(1200));
    let chunks = chunk(&d, 500);
    let counts: Vec<usize> = chunks.iter().map(|c| c.token_count).collect();
    assert_eq!(counts, vec![500, 500, 200]);
    assert_eq!(chunks[2].ordinal, 2);
}

#[test]
fn chunk_exact_boundary_is_one_chunk() {
    let d = doc("d", "t", &words(500));
    assert_eq!(chunk(&d, 500).len(), 1);
}

#[test]
fn chunk_empty_body_is_empty() {
    let d = doc("d", "t", "");
    assert!(chunk(&d, 500).is_empty());
}

#[test]
fn corpus_rejects_duplicate_ids() {
    let err = Corpus::new(vec![doc("a", "x", ""), doc("a", "y", "")]).unwrap_err();
    assert!(err.to_string().contains("duplicate doc_id"));
}

#[test]
fn embed_is_deterministic() {
    let e = HashingEmbedder::default();
    assert_eq!(e.embed("Armie Hammer").unwrap(), e.embed("Armie Hammer").unwrap());
}

#[test]
fn embed_empty_is_zero_vector() {
    let e = HashingEmbedder::default();
    let v = e.embed("").unwrap();
    assert!(v.iter().all(|&x| x == 0.0));
    assert_eq!(v.len(), 256);
}

#[test]
fn embed_self_similarity_is_one() {
    let e = HashingEmbedder::default();
    let v = e.embed("Armie Hammer").unwrap();
    assert!((cosine(&v, &v) - 1.0).abs() < 1e-5);
}

#[test]
fn top_k_verbatim_match_ranks_first() {
    let e = HashingEmbedder::default();
    let candidates = vec![
        "Citizen Kane".to_string(),
        "The Social Network".to_string(),
        "Jesse Eisenberg".to_string(),
    ];
    let got = top_k_similar(&e, "The Social Network", &candidates, 2).unwrap();
    assert_eq!(got[0].index, 1);
    assert!((got[0].score - 1.0).abs() < 1e-5);
}

#[test]
fn top_k_larger_than_candidates_returns_all() {
    let e = HashingEmbedder::default();
    let candidates = vec!["a1".to_string(), "b2".to_string()];
    assert_eq!(top_k_similar(&e, "a1", &candidates, 10).unwrap().len(), 2);
}

#[test]
fn registry_outranks_hockey_for_lowercase_query() {
    let e = HashingEmbedder::default();
    let candidates = vec![
        "National Hockey League".to_string(),
        "National Film Registry".to_string(),
    ];
    // Oracle: compare the raw cosines directly.
    let q = e.embed("national film registry").unwrap();
    let hockey = cosine(&q, &e.embed(&candidates[0]).unwrap());
    let registry = cosine(&q, &e.embed(&candidates[1]).unwrap());
    assert!(registry > hockey, "registry={registry} hockey={hockey}");

    let got = top_k_similar(&e, "national film registry", &candidates, 1).unwrap();
    assert_eq!(got[0].index, 1);
}

#[test]
fn retrieve_exact_title_first() {
    let e = HashingEmbedder::default();
    let corpus = Corpus::new(vec![
        doc("1", "Citizen Kane", ""),
        doc("2", "The Social Network", ""),
        doc("3", "David Fincher", ""),
        doc("4", "The Lone Ranger", ""),
        doc("5", "National Film Registry", ""),
    ])
    .unwrap();
    let got = retrieve_documents(&e, &corpus, "The Social Network", 3).unwrap();
    assert_eq!(got[0].doc_id, "2");
    assert_eq!(got.len(), 3);
}

#[test]
fn retrieve_from_empty_corpus_is_empty() {
    let e = HashingEmbedder::default();
    let corpus = Corpus::default();
    assert!(retrieve_documents(&e, &corpus, "anything", 3).unwrap().is_empty());
}

/// Full-sort oracle with the same tie-break contract.
fn brute_force_rank(embedder: &dyn Embedder, query: &str, candidates: &[String]) -> Vec<Ranked> {
    let q = embedder.embed(query).unwrap();
    let mut all: Vec<Ranked> = candidates
        .iter()
        .enumerate()
        .map(|(index, c)| Ranked {
            index,
            score: cosine(&q, &embedder.embed(c).unwrap()),
        })
        .collect();
    all.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.index.cmp(&b.index)));
    all
}

fn arb_strings(max_len: usize) -> impl Strategy<Value = Vec<String>> {
    proptest::collection::vec("[a-e]{0,8}", 1..max_len)
}

proptest! {
    #[test]
    fn prop_chunk_round_trip(body in "[a-z ]{0,2000}", size in 1usize..64) {
        let d = doc("d", "t", &body);
        let chunks = chunk(&d, size);
        let rejoined: Vec<String> = chunks
            .iter()
            .flat_map(|c| c.text.split_whitespace().map(str::to_string))
            .collect();
        let original: Vec<String> = body.split_whitespace().map(str::to_string).collect();
        prop_assert_eq!(rejoined, original);
        for (i, c) in chunks.iter().enumerate() {
            prop_assert_eq!(c.ordinal, i);
            prop_assert!(c.token_count <= size);
        }
    }

    #[test]
    fn prop_top_k_matches_brute_force(candidates in arb_strings(40), query in "[a-e]{0,8}", k in 1usize..10) {
        let e = HashingEmbedder::new(64);
        let got = top_k_similar(&e, &query, &candidates, k).unwrap();
        let oracle = brute_force_rank(&e, &query, &candidates);
        prop_assert_eq!(got.len(), k.min(candidates.len()));
        for (g, o) in got.iter().zip(oracle.iter()) {
            prop_assert_eq!(g.index, o.index);
            prop_assert_eq!(g.score, o.score);
        }
    }

    // Permuting candidates permutes ranks; score sequences agree exactly.
    #[test]
    fn prop_rank_permutation_invariant(candidates in arb_strings(24), query in "[a-e]{1,8}") {
        let e = HashingEmbedder::new(64);
        let forward = top_k_similar(&e, &query, &candidates, candidates.len()).unwrap();
        let mut reversed: Vec<String> = candidates.clone();
        reversed.reverse();
        let backward = top_k_similar(&e, &query, &reversed, reversed.len()).unwrap();
        let f_scores: Vec<f32> = forward.iter().map(|r| r.score).collect();
        let b_scores: Vec<f32> = backward.iter().map(|r| r.score).collect();
        prop_assert_eq!(f_scores, b_scores);
    }

    #[test]
    fn prop_cosine_symmetric_and_bounded(a in "[a-z ]{0,30}", b in "[a-z ]{0,30}") {
        let e = HashingEmbedder::new(64);
        let va = e.embed(&a).unwrap();
        let vb = e.embed(&b).unwrap();
        let ab = cosine(&va, &vb);
        let ba = cosine(&vb, &va);
        prop_assert!((ab - ba).abs() < 1e-6);
        prop_assert!((-1.0001..=1.0001).contains(&ab));
        // Count-based n-gram vectors never go negative.
        prop_assert!(ab >= 0.0);
    }
}
