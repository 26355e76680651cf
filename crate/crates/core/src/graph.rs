//! Vertices, weighted edges and the edge-stream text format.
//!
//! A stream file holds one edge per line as `u v w`. Blank lines and lines
//! starting with `#` are ignored, and an optional header `p <n> <m>` may
//! precede the first edge. Both LF and CRLF line endings are accepted.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::fs::File;
use std::hash::{Hash, Hasher};
use std::io::{self, BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

/// Opaque vertex identifier. Ids need not be contiguous.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub u64);

impl From<u64> for VertexId {
    fn from(id: u64) -> Self {
        VertexId(id)
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A strictly positive, finite edge weight.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Weight<T>(T);

impl<T: Scalar> Weight<T> {
    pub fn new(value: T) -> Result<Self, EdgeError> {
        if !value.is_finite_value() {
            return Err(EdgeError::NonFiniteWeight);
        }
        if !(value > T::zero()) {
            return Err(EdgeError::NonPositiveWeight);
        }
        Ok(Weight(value))
    }

    pub fn get(self) -> T {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EdgeError {
    #[error("loop at vertex {0}")]
    Loop(VertexId),
    #[error("weight must be strictly positive")]
    NonPositiveWeight,
    #[error("weight must be finite")]
    NonFiniteWeight,
}

/// An undirected weighted edge in canonical form (`u < v`).
///
/// Equality, ordering and hashing look at the endpoints only: an edge is
/// identified by its endpoint pair because the graph has no multi-edges.
#[derive(Clone, Copy, Debug)]
pub struct Edge<T> {
    u: VertexId,
    v: VertexId,
    w: Weight<T>,
}

/// Orders an endpoint pair so the smaller id comes first.
pub fn canonical_pair(a: VertexId, b: VertexId) -> (VertexId, VertexId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

impl<T: Scalar> Edge<T> {
    pub fn new(a: impl Into<VertexId>, b: impl Into<VertexId>, w: T) -> Result<Self, EdgeError> {
        let (a, b) = (a.into(), b.into());
        if a == b {
            return Err(EdgeError::Loop(a));
        }
        let (u, v) = canonical_pair(a, b);
        Ok(Edge {
            u,
            v,
            w: Weight::new(w)?,
        })
    }

    pub fn weight(&self) -> T {
        self.w.get()
    }
}

impl<T> Edge<T> {
    pub fn u(&self) -> VertexId {
        self.u
    }

    pub fn v(&self) -> VertexId {
        self.v
    }

    pub fn key(&self) -> (VertexId, VertexId) {
        (self.u, self.v)
    }

    pub fn endpoints(&self) -> [VertexId; 2] {
        [self.u, self.v]
    }

    pub fn has_vertex(&self, x: VertexId) -> bool {
        self.u == x || self.v == x
    }

    /// The endpoint opposite to `x`, if `x` is an endpoint.
    pub fn other(&self, x: VertexId) -> Option<VertexId> {
        if x == self.u {
            Some(self.v)
        } else if x == self.v {
            Some(self.u)
        } else {
            None
        }
    }

    /// The vertex shared with `other`, if exactly one is shared.
    pub fn shared_vertex(&self, other: &Edge<T>) -> Option<VertexId> {
        if self.key() == other.key() {
            return None;
        }
        self.endpoints().into_iter().find(|&x| other.has_vertex(x))
    }

    /// Whether the two edges have at least one endpoint in common.
    pub fn touches(&self, other: &Edge<T>) -> bool {
        self.has_vertex(other.u) || self.has_vertex(other.v)
    }
}

impl<T> PartialEq for Edge<T> {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}

impl<T> Eq for Edge<T> {}

impl<T> Hash for Edge<T> {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.key().hash(state)
    }
}

impl<T> PartialOrd for Edge<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T> Ord for Edge<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl<T: Scalar> fmt::Display for Edge<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.u, self.v, self.weight())
    }
}

/// True when no two edges share a vertex and no edge is listed twice.
pub fn is_matching<T>(edges: &[Edge<T>]) -> bool {
    let mut seen = HashSet::with_capacity(edges.len() * 2);
    edges.iter().all(|e| seen.insert(e.u) && seen.insert(e.v))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseEdgeError {
    #[error("expected 3 tokens `u v w`, found {0}")]
    TokenCount(usize),
    #[error("invalid vertex id `{0}`")]
    BadVertex(String),
    #[error("invalid weight `{0}`")]
    BadWeight(String),
    #[error(transparent)]
    Edge(#[from] EdgeError),
}

/// Parses one `u v w` line into a canonical edge.
pub fn parse_edge_line<T: Scalar>(line: &str) -> Result<Edge<T>, ParseEdgeError> {
    let tokens: Vec<&str> = line.split_whitespace().collect();
    if tokens.len() != 3 {
        return Err(ParseEdgeError::TokenCount(tokens.len()));
    }
    let vertex = |s: &str| {
        s.parse::<u64>()
            .map(VertexId)
            .map_err(|_| ParseEdgeError::BadVertex(s.to_string()))
    };
    let u = vertex(tokens[0])?;
    let v = vertex(tokens[1])?;
    let w = tokens[2]
        .parse::<T>()
        .map_err(|_| ParseEdgeError::BadWeight(tokens[2].to_string()))?;
    Ok(Edge::new(u, v, w)?)
}

/// Formats an edge as a stream line (without the newline).
pub fn format_edge_line<T: Scalar>(e: &Edge<T>) -> String {
    e.to_string()
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("line {line}: {source}")]
    Parse {
        line: usize,
        #[source]
        source: ParseEdgeError,
    },
    #[error("line {line}: malformed header, expected `p <n> <m>`")]
    BadHeader { line: usize },
    #[error("line {line}: duplicate edge {u} {v}")]
    Duplicate { line: usize, u: VertexId, v: VertexId },
    #[error("{0}")]
    Io(#[from] io::Error),
}

/// What to do with an edge whose endpoint pair was already streamed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DuplicatePolicy {
    #[default]
    Error,
    SkipWithWarning,
}

enum Source<T> {
    Reader(Box<dyn BufRead + Send>),
    Edges(std::vec::IntoIter<Edge<T>>),
}

/// Single-consumer, strictly sequential stream of edges.
pub struct EdgeStream<T> {
    source: Source<T>,
    description: String,
    declared_vertices: Option<u64>,
    declared_edges: Option<u64>,
    policy: DuplicatePolicy,
    seen: HashSet<(VertexId, VertexId)>,
    line_no: usize,
    pending: Option<(usize, String)>,
    done: bool,
}

impl<T: Scalar> EdgeStream<T> {
    /// Wraps an in-memory edge sequence.
    pub fn from_edges(edges: Vec<Edge<T>>, description: impl Into<String>) -> Self {
        EdgeStream {
            source: Source::Edges(edges.into_iter()),
            description: description.into(),
            declared_vertices: None,
            declared_edges: None,
            policy: DuplicatePolicy::Error,
            seen: HashSet::new(),
            line_no: 0,
            pending: None,
            done: false,
        }
    }

    /// Reads a text stream. Leading comments and the optional header are
    /// consumed here so the declared sizes are known before the first edge.
    pub fn from_reader(
        reader: impl BufRead + Send + 'static,
        description: impl Into<String>,
        policy: DuplicatePolicy,
    ) -> Result<Self, GraphError> {
        let mut stream = EdgeStream {
            source: Source::Reader(Box::new(reader)),
            description: description.into(),
            declared_vertices: None,
            declared_edges: None,
            policy,
            seen: HashSet::new(),
            line_no: 0,
            pending: None,
            done: false,
        };
        if let Some((line_no, line)) = stream.next_content_line()? {
            let mut tokens = line.split_whitespace();
            if tokens.next() == Some("p") {
                let parsed: Vec<Option<u64>> = tokens.map(|t| t.parse().ok()).collect();
                match parsed.as_slice() {
                    [Some(n), Some(m)] => {
                        stream.declared_vertices = Some(*n);
                        stream.declared_edges = Some(*m);
                    }
                    _ => return Err(GraphError::BadHeader { line: line_no }),
                }
            } else {
                stream.pending = Some((line_no, line));
            }
        }
        Ok(stream)
    }

    pub fn with_duplicate_policy(mut self, policy: DuplicatePolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn declared_vertices(&self) -> Option<u64> {
        self.declared_vertices
    }

    pub fn declared_edges(&self) -> Option<u64> {
        self.declared_edges
    }

    fn next_content_line(&mut self) -> Result<Option<(usize, String)>, GraphError> {
        let Source::Reader(reader) = &mut self.source else {
            return Ok(None);
        };
        let mut buf = String::new();
        loop {
            buf.clear();
            if reader.read_line(&mut buf)? == 0 {
                return Ok(None);
            }
            self.line_no += 1;
            let trimmed = buf.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            return Ok(Some((self.line_no, trimmed.to_string())));
        }
    }

    fn next_raw(&mut self) -> Result<Option<(usize, Edge<T>)>, GraphError> {
        if let Source::Edges(edges) = &mut self.source {
            self.line_no += 1;
            return Ok(edges.next().map(|e| (self.line_no, e)));
        }
        let next = match self.pending.take() {
            Some(p) => Some(p),
            None => self.next_content_line()?,
        };
        match next {
            None => Ok(None),
            Some((line, text)) => parse_edge_line(&text)
                .map(|e| Some((line, e)))
                .map_err(|source| GraphError::Parse { line, source }),
        }
    }
}

impl<T: Scalar> Iterator for EdgeStream<T> {
    type Item = Result<Edge<T>, GraphError>;

    fn next(&mut self) -> Option<Self::Item> {
        while !self.done {
            match self.next_raw() {
                Ok(None) => self.done = true,
                Err(err) => {
                    self.done = true;
                    return Some(Err(err));
                }
                Ok(Some((line, e))) => {
                    if self.seen.insert(e.key()) {
                        return Some(Ok(e));
                    }
                    match self.policy {
                        DuplicatePolicy::Error => {
                            self.done = true;
                            return Some(Err(GraphError::Duplicate {
                                line,
                                u: e.u(),
                                v: e.v(),
                            }));
                        }
                        DuplicatePolicy::SkipWithWarning => {
                            log::warn!(
                                "{}: line {line}: skipping duplicate edge {} {}",
                                self.description,
                                e.u(),
                                e.v()
                            );
                        }
                    }
                }
            }
        }
        None
    }
}

/// Opens a stream file on disk.
pub fn open_stream<T: Scalar>(path: impl AsRef<Path>, policy: DuplicatePolicy) -> Result<EdgeStream<T>, GraphError> {
    let path = path.as_ref();
    let file = File::open(path)?;
    EdgeStream::from_reader(BufReader::new(file), path.display().to_string(), policy)
}

/// Reads a stream held in a string buffer.
pub fn stream_from_str<T: Scalar>(text: &str, policy: DuplicatePolicy) -> Result<EdgeStream<T>, GraphError> {
    EdgeStream::from_reader(io::Cursor::new(text.to_owned()), "<buffer>", policy)
}

/// Writes edges in the stream format, with a `p <n> <m>` header.
pub fn write_stream<T: Scalar>(out: &mut impl io::Write, vertices: usize, edges: &[Edge<T>]) -> io::Result<()> {
    writeln!(out, "p {} {}", vertices, edges.len())?;
    for e in edges {
        writeln!(out, "{}", format_edge_line(e))?;
    }
    Ok(())
}
