//! Minimal SPARQL endpoint over an in-memory graph, for offline runs and
//! backend-equivalence tests. Serves exactly the query shapes
//! [`super::sparql::RemoteGraph`] issues.

use std::io::{BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Arc;
use std::thread::JoinHandle;

use crate::kg::{EntityId, GraphBackend, KnowledgeGraph, INVERSE_MARKER};

/// What the stub answers with.
pub enum StubBehavior {
    /// Answer queries from this graph.
    Graph(Arc<KnowledgeGraph>),
    /// Return this body verbatim for every query.
    Canned(String),
    /// Return this HTTP status with an empty body.
    Status(u16),
}

/// A bound, running stub endpoint. Shuts down on drop.
pub struct StubSparqlServer {
    endpoint: String,
    requests: Arc<AtomicUsize>,
    stop: Arc<AtomicBool>,
    addr: std::net::SocketAddr,
    handle: Option<JoinHandle<()>>,
}

impl StubSparqlServer {
    /// Bind an ephemeral port, spawn the accept loop.
    pub fn start(iri_prefix: &str, behavior: StubBehavior) -> std::io::Result<Self> {
        let listener = TcpListener::bind("127.0.0.1:0")?;
        let addr = listener.local_addr()?;
        let requests = Arc::new(AtomicUsize::new(0));
        let stop = Arc::new(AtomicBool::new(false));
        let prefix = iri_prefix.to_string();

        let req_counter = Arc::clone(&requests);
        let stop_flag = Arc::clone(&stop);
        let handle = std::thread::spawn(move || {
            for conn in listener.incoming() {
                if stop_flag.load(Ordering::SeqCst) {
                    break;
                }
                let Ok(stream) = conn else { continue };
                req_counter.fetch_add(1, Ordering::SeqCst);
                let _ = serve_one(stream, &prefix, &behavior);
            }
        });

        Ok(StubSparqlServer {
            endpoint: format!("http://{addr}/sparql"),
            requests,
            stop,
            addr,
            handle: Some(handle),
        })
    }

    pub fn endpoint(&self) -> &str {
        &self.endpoint
    }

    pub fn request_count(&self) -> usize {
        self.requests.load(Ordering::SeqCst)
    }
}

impl Drop for StubSparqlServer {
    fn drop(&mut self) {
        self.stop.store(true, Ordering::SeqCst);
        // Unblock the accept loop.
        let _ = TcpStream::connect(self.addr);
        if let Some(h) = self.handle.take() {
            let _ = h.join();
        }
    }
}

fn serve_one(mut stream: TcpStream, prefix: &str, behavior: &StubBehavior) -> std::io::Result<()> {
    let mut reader = BufReader::new(stream.try_clone()?);
    let mut line = String::new();
    reader.read_line(&mut line)?;

    let mut content_length = 0usize;
    loop {
        let mut header = String::new();
        reader.read_line(&mut header)?;
        let header = header.trim_end();
        if header.is_empty() {
            break;
        }
        if let Some(v) = header.to_ascii_lowercase().strip_prefix("content-length:") {
            content_length = v.trim().parse().unwrap_or(0);
        }
    }
    let mut body = vec![0u8; content_length];
    reader.read_exact(&mut body)?;
    let body = String::from_utf8_lossy(&body).to_string();

    let (status, payload) = match behavior {
        StubBehavior::Status(code) => (*code, String::new()),
        StubBehavior::Canned(doc) => (200, doc.clone()),
        StubBehavior::Graph(g) => {
            let query = form_field(&body, "query").unwrap_or_default();
            match answer(g, prefix, &query) {
                Some(values) => (200, results_document(&values)),
                None => (400, String::new()),
            }
        }
    };

    let response = format!(
        "HTTP/1.1 {} {}\r\nContent-Type: application/sparql-results+json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{}",
        status,
        if status == 200 { "OK" } else { "Error" },
        payload.len(),
        payload
    );
    stream.write_all(response.as_bytes())
}

/// Build a SPARQL JSON results document binding each value to `?x`.
pub fn results_document(values: &[String]) -> String {
    let bindings: Vec<serde_json::Value> = values
        .iter()
        .map(|v| serde_json::json!({ "x": { "type": "uri", "value": v } }))
        .collect();
    serde_json::json!({
        "head": { "vars": ["x"] },
        "results": { "bindings": bindings }
    })
    .to_string()
}

fn form_field(body: &str, key: &str) -> Option<String> {
    body.split('&').find_map(|pair| {
        let (k, v) = pair.split_once('=')?;
        (k == key).then(|| percent_decode(v))
    })
}

fn percent_decode(s: &str) -> String {
    let bytes = s.as_bytes();
    let mut out = Vec::with_capacity(bytes.len());
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'+' => {
                out.push(b' ');
                i += 1;
            }
            b'%' if i + 2 < bytes.len() => {
                let hex = &s[i + 1..i + 3];
                match u8::from_str_radix(hex, 16) {
                    Ok(b) => {
                        out.push(b);
                        i += 3;
                    }
                    Err(_) => {
                        out.push(bytes[i]);
                        i += 1;
                    }
                }
            }
            b => {
                out.push(b);
                i += 1;
            }
        }
    }
    String::from_utf8_lossy(&out).to_string()
}

/// Evaluate one of the four query shapes the client issues. Returns the bound
/// values (full IRIs under `prefix` for graph ids), or None for an
/// unrecognized query.
fn answer(g: &KnowledgeGraph, prefix: &str, query: &str) -> Option<Vec<String>> {
    let inner = query
        .split_once('{')
        .map(|(_, rest)| rest.rsplit_once('}').map(|(i, _)| i).unwrap_or(rest))?
        .trim()
        .trim_end_matches('.')
        .trim();
    let terms: Vec<&str> = inner.split_whitespace().collect();
    if terms.len() != 3 {
        return None;
    }
    let strip = |t: &str| -> Option<String> {
        let iri = t.strip_prefix('<')?.strip_suffix('>')?;
        Some(iri.strip_prefix(prefix).unwrap_or(iri).to_string())
    };

    let qualify = |id: &str| format!("{prefix}{id}");
    match (strip(terms[0]), strip(terms[1]), strip(terms[2])) {
        // <e> ?x ?o  -> outbound relations
        (Some(e), None, None) => {
            let nbhd = g.one_hop_relations(&EntityId::new(e)).ok()?;
            Some(nbhd.outbound.iter().map(|r| qualify(r)).collect())
        }
        // ?s ?x <e>  -> inbound relations
        (None, None, Some(e)) => {
            let nbhd = g.one_hop_relations(&EntityId::new(e)).ok()?;
            Some(nbhd.inbound.iter().map(|r| qualify(r)).collect())
        }
        // <e> <r> ?x -> outbound tails
        (Some(e), Some(r), None) => {
            let triples = g.triples_for(&EntityId::new(e), &[r]).ok()?;
            Some(triples.iter().map(|t| qualify(t.tail.as_str())).collect())
        }
        // ?x <r> <e> -> inbound heads
        (None, Some(r), Some(e)) => {
            let sel = format!("{INVERSE_MARKER}{r}");
            let triples = g.triples_for(&EntityId::new(e), &[sel]).ok()?;
            Some(triples.iter().map(|t| qualify(t.head.as_str())).collect())
        }
        _ => None,
    }
}
