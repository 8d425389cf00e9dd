//! Remote graph backend speaking the SPARQL protocol over HTTP.
//!
//! Mirrors the in-memory [`GraphBackend`] contract: same neighborhoods, same
//! triple ordering. Results are memoized per entity for the lifetime of the
//! client because iterative exploration revisits entities.

use std::collections::HashMap;
use std::sync::Mutex;
use std::time::Duration;

use serde::Deserialize;

use crate::error::{DomError, Result};
use crate::kg::{EntityId, GraphBackend, RelationNeighborhood, Triple, INVERSE_MARKER};

/// Connection settings for a SPARQL endpoint.
#[derive(Debug, Clone)]
pub struct SparqlConfig {
    pub endpoint: String,
    /// IRI prefix entities are expressed under, e.g. `http://rdf.freebase.com/ns/`.
    pub iri_prefix: String,
    pub timeout: Duration,
    /// Total attempts per request, transport failures only.
    pub retries: u32,
}

impl SparqlConfig {
    pub fn new(endpoint: impl Into<String>) -> Self {
        SparqlConfig {
            endpoint: endpoint.into(),
            iri_prefix: "http://rdf.freebase.com/ns/".to_string(),
            timeout: Duration::from_secs(10),
            retries: 3,
        }
    }
}

#[derive(Debug, Deserialize)]
struct SparqlResults {
    results: SparqlBindings,
}

#[derive(Debug, Deserialize)]
struct SparqlBindings {
    bindings: Vec<HashMap<String, SparqlTerm>>,
}

#[derive(Debug, Deserialize)]
struct SparqlTerm {
    value: String,
}

/// SPARQL-endpoint-backed [`GraphBackend`] with per-entity memoization.
pub struct RemoteGraph {
    config: SparqlConfig,
    client: reqwest::blocking::Client,
    neighborhoods: Mutex<HashMap<EntityId, RelationNeighborhood>>,
    // Keyed by (entity, presented relation name) so inverse selections cache
    // independently of outbound ones.
    triples: Mutex<HashMap<(EntityId, String), Vec<Triple>>>,
}

impl RemoteGraph {
    pub fn new(config: SparqlConfig) -> Result<Self> {
        let client = reqwest::blocking::Client::builder()
            .timeout(config.timeout)
            .build()
            .map_err(|e| DomError::Backend {
                msg: format!("failed to build http client: {e}"),
                status: None,
                retriable: false,
            })?;
        Ok(RemoteGraph {
            config,
            client,
            neighborhoods: Mutex::new(HashMap::new()),
            triples: Mutex::new(HashMap::new()),
        })
    }

    fn iri(&self, id: &str) -> String {
        format!("{}{}", self.config.iri_prefix, id)
    }

    /// Strip the configured prefix; values outside it pass through raw
    /// (literals and foreign IRIs).
    fn to_id(&self, value: &str) -> EntityId {
        EntityId::new(
            value
                .strip_prefix(&self.config.iri_prefix)
                .unwrap_or(value),
        )
    }

    fn select(&self, query: &str) -> Result<Vec<String>> {
        let mut last_err = None;
        for _ in 0..self.config.retries.max(1) {
            let sent = self
                .client
                .post(&self.config.endpoint)
                .header("Accept", "application/sparql-results+json")
                .form(&[("query", query)])
                .send();
            match sent {
                Ok(resp) => {
                    let status = resp.status();
                    if !status.is_success() {
                        return Err(DomError::Backend {
                            msg: format!("sparql endpoint rejected query: {query}"),
                            status: Some(status.as_u16()),
                            retriable: false,
                        });
                    }
                    let parsed: SparqlResults = resp.json().map_err(|e| DomError::Backend {
                        msg: format!("malformed sparql result document: {e}"),
                        status: None,
                        retriable: false,
                    })?;
                    let values = parsed
                        .results
                        .bindings
                        .into_iter()
                        .filter_map(|mut b| b.remove("x").map(|t| t.value))
                        .collect();
                    return Ok(values);
                }
                Err(e) => {
                    last_err = Some(DomError::Backend {
                        msg: format!("sparql request failed: {e}"),
                        status: None,
                        retriable: true,
                    });
                }
            }
        }
        Err(last_err.unwrap_or(DomError::Backend {
            msg: "sparql request failed".to_string(),
            status: None,
            retriable: true,
        }))
    }
}

impl GraphBackend for RemoteGraph {
    fn one_hop_relations(&self, e: &EntityId) -> Result<RelationNeighborhood> {
        if let Some(hit) = self.neighborhoods.lock().unwrap().get(e) {
            return Ok(hit.clone());
        }
        let iri = self.iri(e.as_str());
        let mut outbound: Vec<String> = self
            .select(&format!("SELECT DISTINCT ?x WHERE {{ <{iri}> ?x ?o . }}"))?
            .iter()
            .map(|v| self.to_id(v).0)
            .collect();
        let mut inbound: Vec<String> = self
            .select(&format!("SELECT DISTINCT ?x WHERE {{ ?s ?x <{iri}> . }}"))?
            .iter()
            .map(|v| self.to_id(v).0)
            .collect();
        outbound.sort();
        outbound.dedup();
        inbound.sort();
        inbound.dedup();
        let nbhd = RelationNeighborhood { outbound, inbound };
        self.neighborhoods
            .lock()
            .unwrap()
            .insert(e.clone(), nbhd.clone());
        Ok(nbhd)
    }

    fn triples_for(&self, e: &EntityId, relations: &[String]) -> Result<Vec<Triple>> {
        let mut found = Vec::new();
        for presented in relations {
            let key = (e.clone(), presented.clone());
            if let Some(hit) = self.triples.lock().unwrap().get(&key) {
                found.extend(hit.iter().cloned());
                continue;
            }
            let iri = self.iri(e.as_str());
            let batch: Vec<Triple> = match presented.strip_prefix(INVERSE_MARKER) {
                None => {
                    let rel_iri = self.iri(presented);
                    self.select(&format!(
                        "SELECT DISTINCT ?x WHERE {{ <{iri}> <{rel_iri}> ?x . }}"
                    ))?
                    .iter()
                    .map(|v| Triple {
                        head: e.clone(),
                        relation: presented.clone(),
                        tail: self.to_id(v),
                    })
                    .collect()
                }
                Some(inner) => {
                    let rel_iri = self.iri(inner);
                    self.select(&format!(
                        "SELECT DISTINCT ?x WHERE {{ ?x <{rel_iri}> <{iri}> . }}"
                    ))?
                    .iter()
                    .map(|v| Triple {
                        head: self.to_id(v),
                        relation: inner.to_string(),
                        tail: e.clone(),
                    })
                    .collect()
                }
            };
            self.triples.lock().unwrap().insert(key, batch.clone());
            found.extend(batch);
        }
        found.sort_by(|a, b| (&a.relation, &a.tail, &a.head).cmp(&(&b.relation, &b.tail, &b.head)));
        found.dedup();
        Ok(found)
    }
}
