use std::collections::BTreeSet;
use std::io::Write;
use std::path::PathBuf;

use proptest::prelude::*;

use super::degrade::{removal_count, remove_crucial_triples};
use super::*;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures/case_study")
        .join(name)
}

fn case_study_kg() -> KnowledgeGraph {
    load_kg(&fixture("kg.tsv"), &fixture("names.tsv")).unwrap()
}

fn tiny_graph(triples: &[(&str, &str, &str)]) -> KnowledgeGraph {
    KnowledgeGraph::from_parts(
        triples.iter().map(|(h, r, t)| Triple::new(*h, *r, *t)),
        Vec::new(),
    )
}

fn write_temp(contents: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(contents.as_bytes()).unwrap();
    f
}

#[test]
fn load_dedups_triples() {
    let triples = write_temp("a\tr1\tb\nb\tr2\tc\na\tr1\tb\n");
    let names = write_temp("");
    let g = load_kg(triples.path(), names.path()).unwrap();
    assert_eq!(g.triple_count(), 2);
    assert_eq!(g.entity_count(), 3);
}

#[test]
fn load_empty_file_is_valid() {
    let triples = write_temp("");
    let names = write_temp("");
    let g = load_kg(triples.path(), names.path()).unwrap();
    assert_eq!(g.triple_count(), 0);
    assert_eq!(g.entity_count(), 0);
}

#[test]
fn load_reports_malformed_line_number() {
    let triples = write_temp("a\tr1\tb\nbroken line\n");
    let names = write_temp("");
    let err = load_kg(triples.path(), names.path()).unwrap_err();
    match err {
        DomError::Parse { line, .. } => assert_eq!(line, 2),
        other => panic!("expected parse error, got {other:?}"),
    }
}

#[test]
fn load_skips_comments_and_blanks() {
    let triples = write_temp("# header\n\na\tr1\tb\n");
    let names = write_temp("a\tAlpha\n# note\n");
    let g = load_kg(triples.path(), names.path()).unwrap();
    assert_eq!(g.triple_count(), 1);
    assert_eq!(g.display_name(&EntityId::new("a")), "Alpha");
}

#[test]
fn load_single_triple_case_study_shape() {
    let triples = write_temp("m.0ah\tfilm.actor.film\tm.0tsn\n");
    let names = write_temp("m.0ah\tArmie Hammer\nm.0tsn\tThe Social Network\n");
    let g = load_kg(triples.path(), names.path()).unwrap();
    let nbhd = g.one_hop_relations(&EntityId::new("m.0ah")).unwrap();
    assert_eq!(nbhd.outbound, vec!["film.actor.film".to_string()]);
}

#[test]
fn one_hop_directions() {
    let g = tiny_graph(&[("a", "r1", "b"), ("a", "r2", "c"), ("d", "r3", "a")]);
    let nbhd = g.one_hop_relations(&EntityId::new("a")).unwrap();
    assert_eq!(nbhd.outbound, vec!["r1", "r2"]);
    assert_eq!(nbhd.inbound, vec!["r3"]);
    assert_eq!(nbhd.presented(), vec!["r1", "r2", "~r3"]);
}

#[test]
fn one_hop_isolated_entity_is_empty() {
    let g = KnowledgeGraph::from_parts(
        vec![Triple::new("a", "r", "b")],
        vec![(EntityId::new("lonely"), "Lonely".to_string())],
    );
    let nbhd = g.one_hop_relations(&EntityId::new("lonely")).unwrap();
    assert!(nbhd.outbound.is_empty() && nbhd.inbound.is_empty());
}

#[test]
fn one_hop_unknown_entity_errors() {
    let g = tiny_graph(&[("a", "r", "b")]);
    let err = g.one_hop_relations(&EntityId::new("zzz")).unwrap_err();
    assert!(matches!(err, DomError::EntityNotFound(_)));
}

#[test]
fn case_study_inbound_derived_by_scan() {
    let g = case_study_kg();
    let tsn = EntityId::new("m.0tsn");
    // Oracle: enumerate relations of triples whose tail is m.0tsn.
    let expected: BTreeSet<String> = g
        .triples()
        .iter()
        .filter(|t| t.tail == tsn)
        .map(|t| t.relation.clone())
        .collect();
    let nbhd = g.one_hop_relations(&tsn).unwrap();
    assert_eq!(
        nbhd.inbound.iter().cloned().collect::<BTreeSet<_>>(),
        expected
    );
    assert!(nbhd.inbound.contains(&"film.actor.film".to_string()));
}

#[test]
fn triples_for_filters_by_relation() {
    let g = tiny_graph(&[("a", "r1", "b"), ("a", "r1", "c"), ("a", "r2", "d")]);
    let got = g
        .triples_for(&EntityId::new("a"), &["r1".to_string()])
        .unwrap();
    assert_eq!(
        got,
        vec![Triple::new("a", "r1", "b"), Triple::new("a", "r1", "c")]
    );
}

#[test]
fn triples_for_empty_selection() {
    let g = tiny_graph(&[("a", "r1", "b")]);
    assert!(g.triples_for(&EntityId::new("a"), &[]).unwrap().is_empty());
}

#[test]
fn triples_for_inverse_marker_selects_inbound() {
    let g = tiny_graph(&[("a", "r", "b"), ("c", "r", "b"), ("b", "r", "d")]);
    let got = g
        .triples_for(&EntityId::new("b"), &["~r".to_string()])
        .unwrap();
    assert_eq!(got, vec![Triple::new("a", "r", "b"), Triple::new("c", "r", "b")]);
}

#[test]
fn case_study_actor_film_scan() {
    let g = case_study_kg();
    let got = g
        .triples_for(&EntityId::new("m.0ah"), &["film.actor.film".to_string()])
        .unwrap();
    assert_eq!(got, vec![Triple::new("m.0ah", "film.actor.film", "m.0tsn")]);
}

#[test]
fn removal_count_arithmetic() {
    assert_eq!(removal_count(10, 0.4), 4);
    assert_eq!(removal_count(5, 0.5), 3); // round half up
    assert_eq!(removal_count(0, 0.8), 0);
    assert_eq!(removal_count(1000, 0.2), 200);
}

fn chain_graph(n: usize) -> (KnowledgeGraph, Vec<Triple>) {
    let triples: Vec<Triple> = (0..n)
        .map(|i| Triple::new(format!("e{i}"), "r", format!("e{}", i + 1)))
        .collect();
    (
        KnowledgeGraph::from_parts(triples.clone(), Vec::new()),
        triples,
    )
}

#[test]
fn remove_ratio_zero_is_identity() {
    let (g, gold) = chain_graph(10);
    let (g2, removed) = remove_crucial_triples(&g, &gold, 0.0, 42).unwrap();
    assert!(removed.is_empty());
    assert_eq!(g2.triple_count(), g.triple_count());
}

#[test]
fn remove_exact_count() {
    let (g, gold) = chain_graph(10);
    let (g2, removed) = remove_crucial_triples(&g, &gold, 0.4, 1).unwrap();
    assert_eq!(removed.len(), 4);
    assert_eq!(g2.triple_count(), g.triple_count() - 4);
}

#[test]
fn remove_same_seed_same_set() {
    let (g, gold) = chain_graph(5);
    let (_, r1) = remove_crucial_triples(&g, &gold, 0.8, 7).unwrap();
    let (_, r2) = remove_crucial_triples(&g, &gold, 0.8, 7).unwrap();
    assert_eq!(r1, r2);
    assert_eq!(r1.len(), 4);
}

#[test]
fn remove_missing_gold_triple_is_integrity_error() {
    let (g, mut gold) = chain_graph(3);
    gold.push(Triple::new("ghost", "r", "nowhere"));
    let err = remove_crucial_triples(&g, &gold, 0.5, 0).unwrap_err();
    match err {
        DomError::Integrity(msg) => assert!(msg.contains("ghost")),
        other => panic!("expected integrity error, got {other:?}"),
    }
}

#[test]
fn remove_sets_nest_across_ratios_for_fixed_seed() {
    let (g, gold) = chain_graph(20);
    let mut previous: BTreeSet<Triple> = BTreeSet::new();
    for ratio in [0.2, 0.4, 0.6, 0.8] {
        let (_, removed) = remove_crucial_triples(&g, &gold, ratio, 99).unwrap();
        let set: BTreeSet<Triple> = removed.into_iter().collect();
        assert!(previous.is_subset(&set));
        previous = set;
    }
}

fn arb_triples(max: usize) -> impl Strategy<Value = Vec<Triple>> {
    proptest::collection::vec((0usize..40, 0usize..6, 0usize..40), 0..max).prop_map(|raw| {
        raw.into_iter()
            .map(|(h, r, t)| Triple::new(format!("e{h}"), format!("r{r}"), format!("e{t}")))
            .collect()
    })
}

proptest! {
    // Index rebuild reproduces adjacency exactly.
    #[test]
    fn prop_index_rebuild_equivalence(triples in arb_triples(200)) {
        let g = KnowledgeGraph::from_parts(triples, Vec::new());
        let mut rebuilt = g.clone();
        rebuilt.rebuild_indexes();
        prop_assert_eq!(&g.by_head, &rebuilt.by_head);
        prop_assert_eq!(&g.by_tail, &rebuilt.by_tail);
        prop_assert_eq!(&g.entities, &rebuilt.entities);
    }

    // Selecting every presented relation returns exactly the incident triple set.
    #[test]
    fn prop_full_selection_equals_incident_scan(triples in arb_triples(150)) {
        let g = KnowledgeGraph::from_parts(triples, Vec::new());
        for e in g.entities.iter() {
            let nbhd = g.one_hop_relations(e).unwrap();
            let got: BTreeSet<Triple> =
                g.triples_for(e, &nbhd.presented()).unwrap().into_iter().collect();
            let brute: BTreeSet<Triple> = g
                .triples()
                .iter()
                .filter(|t| &t.head == e || &t.tail == e)
                .cloned()
                .collect();
            prop_assert_eq!(got, brute);
        }
    }

    // Removal: deterministic, exact count, gold-only, at every paper ratio.
    #[test]
    fn prop_removal_protocol(n in 1usize..120, seed in any::<u64>()) {
        let (g, gold) = chain_graph(n);
        for ratio in [0.2f64, 0.4, 0.6, 0.8] {
            let (g2, removed) = remove_crucial_triples(&g, &gold, ratio, seed).unwrap();
            let (_, again) = remove_crucial_triples(&g, &gold, ratio, seed).unwrap();
            prop_assert_eq!(&removed, &again);
            prop_assert_eq!(removed.len(), removal_count(n, ratio));
            prop_assert_eq!(g2.triple_count(), g.triple_count() - removed.len());
            let gold_set: BTreeSet<&Triple> = gold.iter().collect();
            prop_assert!(removed.iter().all(|t| gold_set.contains(t)));
        }
    }
}
