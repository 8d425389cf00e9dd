//! Knowledge graph data model and backends.
//!
//! Triples are loaded from a TSV file (`head<TAB>relation<TAB>tail`), display
//! names from a second TSV (`entity_id<TAB>name`). The in-memory
//! [`KnowledgeGraph`] and the remote SPARQL client in [`sparql`] implement the
//! same [`GraphBackend`] contract, so agents do not care where triples live.

pub mod degrade;
pub mod sparql;
pub mod stub;

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{DomError, Result};

/// Prefix marking an inbound (inverse) relation wherever relations are
/// presented as flat strings: neighborhood listings, prompts, and the
/// relation lists accepted by [`GraphBackend::triples_for`].
pub const INVERSE_MARKER: char = '~';

/// Opaque machine identifier of a graph node (MID, e.g. `m.0tsn`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EntityId(pub String);

impl EntityId {
    pub fn new(id: impl Into<String>) -> Self {
        EntityId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for EntityId {
    fn from(s: &str) -> Self {
        EntityId(s.to_string())
    }
}

/// One factual `(head, relation, tail)` statement. Immutable once stored.
///
/// Tails may be entity ids or literals (dates, numbers). Literals are simply
/// ids that never occur as a head, which makes them terminal for exploration
/// without any special casing.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Triple {
    pub head: EntityId,
    pub relation: String,
    pub tail: EntityId,
}

impl Triple {
    pub fn new(
        head: impl Into<String>,
        relation: impl Into<String>,
        tail: impl Into<String>,
    ) -> Self {
        Triple {
            head: EntityId::new(head),
            relation: relation.into(),
            tail: EntityId::new(tail),
        }
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.head, self.relation, self.tail)
    }
}

/// Distinct one-hop relations around an entity, split by direction.
///
/// Both lists hold plain relation names, deduplicated and sorted. Inbound
/// names gain the `~` marker only when rendered via [`RelationNeighborhood::presented`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RelationNeighborhood {
    pub outbound: Vec<String>,
    pub inbound: Vec<String>,
}

impl RelationNeighborhood {
    pub fn is_empty(&self) -> bool {
        self.outbound.is_empty() && self.inbound.is_empty()
    }

    /// All relations as the strings shown to the LLM: outbound names plain,
    /// inbound names prefixed with `~`.
    pub fn presented(&self) -> Vec<String> {
        let mut out: Vec<String> = self.outbound.clone();
        out.extend(self.inbound.iter().map(|r| format!("{INVERSE_MARKER}{r}")));
        out
    }
}

/// Shared read contract of the in-memory store and the SPARQL client.
pub trait GraphBackend: Send + Sync {
    /// Distinct one-hop relations of `e`, both directions, sorted.
    fn one_hop_relations(&self, e: &EntityId) -> Result<RelationNeighborhood>;

    /// Triples incident to `e` along the given relations. Plain names select
    /// outbound triples (`head = e`), `~`-prefixed names inbound ones
    /// (`tail = e`). Result is sorted by `(relation, tail, head)`.
    fn triples_for(&self, e: &EntityId, relations: &[String]) -> Result<Vec<Triple>>;
}

/// Immutable in-memory triple store with name registry and adjacency indexes.
#[derive(Debug, Clone, Default)]
pub struct KnowledgeGraph {
    triples: Vec<Triple>,
    names: BTreeMap<EntityId, String>,
    by_head: HashMap<EntityId, Vec<usize>>,
    by_tail: HashMap<EntityId, Vec<usize>>,
    entities: BTreeSet<EntityId>,
}

impl KnowledgeGraph {
    /// Build a graph from triples and display names. Duplicate triples are
    /// silently dropped; every head, tail, and named id becomes an entity.
    pub fn from_parts(
        triples: impl IntoIterator<Item = Triple>,
        names: impl IntoIterator<Item = (EntityId, String)>,
    ) -> Self {
        let mut seen = HashSet::new();
        let mut kept = Vec::new();
        for t in triples {
            if seen.insert(t.clone()) {
                kept.push(t);
            }
        }
        kept.sort();

        let mut g = KnowledgeGraph {
            triples: kept,
            names: names.into_iter().collect(),
            ..Default::default()
        };
        g.rebuild_indexes();
        g
    }

    fn rebuild_indexes(&mut self) {
        self.by_head.clear();
        self.by_tail.clear();
        self.entities.clear();
        for (i, t) in self.triples.iter().enumerate() {
            self.by_head.entry(t.head.clone()).or_default().push(i);
            self.by_tail.entry(t.tail.clone()).or_default().push(i);
            self.entities.insert(t.head.clone());
            self.entities.insert(t.tail.clone());
        }
        self.entities.extend(self.names.keys().cloned());
    }

    pub fn triple_count(&self) -> usize {
        self.triples.len()
    }

    pub fn entity_count(&self) -> usize {
        self.entities.len()
    }

    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    pub fn contains_entity(&self, e: &EntityId) -> bool {
        self.entities.contains(e)
    }

    pub fn contains_triple(&self, t: &Triple) -> bool {
        self.triples.binary_search(t).is_ok()
    }

    /// Display name of an entity, falling back to the raw id.
    pub fn display_name<'a>(&'a self, e: &'a EntityId) -> &'a str {
        self.names.get(e).map(String::as_str).unwrap_or(e.as_str())
    }

    /// All `(id, name)` pairs known to the registry, sorted by id. Entities
    /// without an explicit name are listed under their id.
    pub fn entity_names(&self) -> Vec<(EntityId, String)> {
        self.entities
            .iter()
            .map(|e| (e.clone(), self.display_name(e).to_string()))
            .collect()
    }

    /// Entity ids carrying the given display name (names are not globally
    /// unique), sorted.
    pub fn ids_for_name(&self, name: &str) -> Vec<EntityId> {
        self.entities
            .iter()
            .filter(|e| self.display_name(e) == name)
            .cloned()
            .collect()
    }

    pub fn names(&self) -> &BTreeMap<EntityId, String> {
        &self.names
    }

    /// Replicate the triple set without the given ones; names carry over.
    pub fn without_triples(&self, remove: &[Triple]) -> KnowledgeGraph {
        let gone: HashSet<&Triple> = remove.iter().collect();
        KnowledgeGraph::from_parts(
            self.triples.iter().filter(|t| !gone.contains(t)).cloned(),
            self.names.clone(),
        )
    }

    fn require_entity(&self, e: &EntityId) -> Result<()> {
        if self.contains_entity(e) {
            Ok(())
        } else {
            Err(DomError::EntityNotFound(e.to_string()))
        }
    }
}

impl GraphBackend for KnowledgeGraph {
    fn one_hop_relations(&self, e: &EntityId) -> Result<RelationNeighborhood> {
        self.require_entity(e)?;
        let mut outbound: Vec<String> = self
            .by_head
            .get(e)
            .into_iter()
            .flatten()
            .map(|&i| self.triples[i].relation.clone())
            .collect();
        let mut inbound: Vec<String> = self
            .by_tail
            .get(e)
            .into_iter()
            .flatten()
            .map(|&i| self.triples[i].relation.clone())
            .collect();
        outbound.sort();
        outbound.dedup();
        inbound.sort();
        inbound.dedup();
        Ok(RelationNeighborhood { outbound, inbound })
    }

    fn triples_for(&self, e: &EntityId, relations: &[String]) -> Result<Vec<Triple>> {
        self.require_entity(e)?;
        let mut out_rels = HashSet::new();
        let mut in_rels = HashSet::new();
        for r in relations {
            match r.strip_prefix(INVERSE_MARKER) {
                Some(inner) => in_rels.insert(inner.to_string()),
                None => out_rels.insert(r.clone()),
            };
        }
        let mut found: Vec<Triple> = Vec::new();
        for &i in self.by_head.get(e).into_iter().flatten() {
            if out_rels.contains(&self.triples[i].relation) {
                found.push(self.triples[i].clone());
            }
        }
        for &i in self.by_tail.get(e).into_iter().flatten() {
            if in_rels.contains(&self.triples[i].relation) {
                found.push(self.triples[i].clone());
            }
        }
        found.sort_by(|a, b| {
            (&a.relation, &a.tail, &a.head).cmp(&(&b.relation, &b.tail, &b.head))
        });
        found.dedup();
        Ok(found)
    }
}

fn parse_tsv_line(path: &str, lineno: usize, line: &str, want: usize) -> Result<Vec<String>> {
    let fields: Vec<&str> = line.split('\t').collect();
    if fields.len() != want || fields.iter().any(|f| f.trim().is_empty()) {
        return Err(DomError::Parse {
            path: path.to_string(),
            line: lineno,
            msg: format!("expected {want} non-empty tab-separated fields"),
        });
    }
    Ok(fields.iter().map(|f| f.trim().to_string()).collect())
}

/// Load a graph from a triples TSV and a names TSV.
///
/// Blank lines and `#` comments are ignored in both files. Duplicate triples
/// are deduplicated; a malformed line is a parse error carrying its number.
pub fn load_kg(path: &Path, names_path: &Path) -> Result<KnowledgeGraph> {
    let triples = read_triples_file(path)?;
    let names = read_names_file(names_path)?;
    Ok(KnowledgeGraph::from_parts(triples, names))
}

/// Read a triples TSV into a list, preserving duplicates for the caller.
pub fn read_triples_file(path: &Path) -> Result<Vec<Triple>> {
    let display = path.display().to_string();
    let body = fs::read_to_string(path).map_err(|e| DomError::io(&display, e))?;
    let mut triples = Vec::new();
    for (idx, line) in body.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let f = parse_tsv_line(&display, idx + 1, line, 3)?;
        triples.push(Triple::new(f[0].clone(), f[1].clone(), f[2].clone()));
    }
    Ok(triples)
}

/// Read a names TSV (`entity_id<TAB>display name`).
pub fn read_names_file(path: &Path) -> Result<Vec<(EntityId, String)>> {
    let display = path.display().to_string();
    let body = fs::read_to_string(path).map_err(|e| DomError::io(&display, e))?;
    let mut names = Vec::new();
    for (idx, line) in body.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let f = parse_tsv_line(&display, idx + 1, line, 2)?;
        names.push((EntityId::new(f[0].clone()), f[1].clone()));
    }
    Ok(names)
}

/// Write triples back out in the same TSV format `load_kg` reads.
pub fn write_triples_file(path: &Path, triples: &[Triple]) -> Result<()> {
    let display = path.display().to_string();
    let mut body = String::new();
    for t in triples {
        body.push_str(&format!("{}\t{}\t{}\n", t.head, t.relation, t.tail));
    }
    fs::write(path, body).map_err(|e| DomError::io(&display, e))
}

#[cfg(test)]
mod tests;
