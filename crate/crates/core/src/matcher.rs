//! Types shared by the one-pass matchers.

use thiserror::Error;

use crate::graph::{Edge, VertexId};
use crate::scalar::{sum, Scalar};

/// Outcome of processing one stream edge.
#[derive(Clone, Debug, PartialEq)]
pub struct InsertionDecision<T> {
    /// The best augmenting set found, sorted by endpoints.
    pub chosen: Vec<Edge<T>>,
    /// Matching edges adjacent to `chosen`, sorted by endpoints.
    pub removed: Vec<Edge<T>>,
    pub gain: T,
    pub inserted: bool,
}

impl<T: Scalar> InsertionDecision<T> {
    pub fn chosen_weight(&self) -> T {
        sum(self.chosen.iter().map(Edge::weight))
    }

    pub fn removed_weight(&self) -> T {
        sum(self.removed.iter().map(Edge::weight))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatcherError {
    #[error("parameter k must be finite and greater than 1, got {0}")]
    InvalidK(String),
    #[error("parameter gamma must be finite and non-negative, got {0}")]
    InvalidGamma(String),
    #[error("edge {0} {1} is already stored by the matcher")]
    EdgeAlreadyStored(VertexId, VertexId),
    #[error("inconsistent state: {0}")]
    Inconsistent(String),
}

/// Per-run work and memory counters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MatcherStats {
    pub edges_seen: u64,
    pub insertions: u64,
    /// High-water mark of matching edges plus distinct shadow edges.
    pub max_stored_edges: usize,
    /// Largest number of candidate sets evaluated for one input edge.
    pub max_candidates: usize,
    /// Largest number of distinct stored edges inspected for one input edge.
    pub max_touched: usize,
}

/// Common surface of the one-pass matchers, used by the harness.
pub trait StreamingMatcher<T: Scalar> {
    fn process_edge(&mut self, e: Edge<T>) -> Result<InsertionDecision<T>, MatcherError>;

    /// Current matching, sorted by endpoints.
    fn matching_edges(&self) -> Vec<Edge<T>>;

    fn matching_weight(&self) -> T {
        sum(self.matching_edges().iter().map(Edge::weight))
    }

    /// Edges currently held in memory.
    fn stored_edges(&self) -> usize;

    fn stats(&self) -> MatcherStats;
}
