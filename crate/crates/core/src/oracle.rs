//! Exact maximum weight matching for small graphs.
//!
//! Exhaustive include/exclude branching over the edges in descending weight
//! order. A branch is cut when even the best case cannot beat the incumbent:
//! the remaining edges whose endpoints are both still free, of which at most
//! `free / 2` can still be chosen, so the bound is the sum of the heaviest
//! `free / 2` of them.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap, HashSet};

use thiserror::Error;

use crate::graph::{Edge, VertexId};
use crate::scalar::{sum, Scalar};

pub const DEFAULT_EDGE_LIMIT: usize = 40;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("graph has {edges} edges, above the exhaustive-search limit of {limit}; skip the ratio computation")]
    Capacity { edges: usize, limit: usize },
    #[error("duplicate edge {0} {1}")]
    DuplicateEdge(VertexId, VertexId),
}

/// A small graph held entirely in memory.
#[derive(Clone, Debug)]
pub struct DenseGraph<T> {
    vertices: BTreeSet<VertexId>,
    edges: Vec<Edge<T>>,
}

impl<T: Scalar> DenseGraph<T> {
    pub fn new(edges: Vec<Edge<T>>) -> Result<Self, OracleError> {
        Self::with_vertices([], edges)
    }

    /// Also registers vertices that may be isolated.
    pub fn with_vertices(
        vertices: impl IntoIterator<Item = VertexId>,
        edges: Vec<Edge<T>>,
    ) -> Result<Self, OracleError> {
        let mut seen = HashSet::with_capacity(edges.len());
        for e in &edges {
            if !seen.insert(e.key()) {
                return Err(OracleError::DuplicateEdge(e.u(), e.v()));
            }
        }
        let mut vertices: BTreeSet<VertexId> = vertices.into_iter().collect();
        vertices.extend(edges.iter().flat_map(Edge::endpoints));
        Ok(DenseGraph { vertices, edges })
    }

    pub fn vertices(&self) -> &BTreeSet<VertexId> {
        &self.vertices
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edges(&self) -> &[Edge<T>] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimalResult<T> {
    pub weight: T,
    /// One optimal matching, sorted by endpoints.
    pub matching: Vec<Edge<T>>,
}

pub fn max_weight_matching<T: Scalar>(g: &DenseGraph<T>) -> Result<OptimalResult<T>, OracleError> {
    max_weight_matching_with_limit(g, DEFAULT_EDGE_LIMIT)
}

pub fn max_weight_matching_with_limit<T: Scalar>(
    g: &DenseGraph<T>,
    edge_limit: usize,
) -> Result<OptimalResult<T>, OracleError> {
    if g.edge_count() > edge_limit {
        return Err(OracleError::Capacity {
            edges: g.edge_count(),
            limit: edge_limit,
        });
    }
    let index: HashMap<VertexId, usize> = g.vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut edges: Vec<Edge<T>> = g.edges.clone();
    edges.sort_by(|a, b| {
        b.weight()
            .partial_cmp(&a.weight())
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.key().cmp(&b.key()))
    });
    let ends: Vec<(usize, usize)> = edges.iter().map(|e| (index[&e.u()], index[&e.v()])).collect();

    let mut search = Search {
        edges: &edges,
        ends: &ends,
        used: vec![false; g.vertex_count()],
        free: g.vertex_count(),
        current: Vec::new(),
        current_weight: T::zero(),
        best: Vec::new(),
        best_weight: T::zero(),
    };
    search.branch(0);

    let mut matching: Vec<Edge<T>> = search.best.iter().map(|&i| edges[i]).collect();
    matching.sort();
    Ok(OptimalResult {
        weight: sum(matching.iter().map(Edge::weight)),
        matching,
    })
}

struct Search<'a, T> {
    edges: &'a [Edge<T>],
    ends: &'a [(usize, usize)],
    used: Vec<bool>,
    free: usize,
    current: Vec<usize>,
    current_weight: T,
    best: Vec<usize>,
    best_weight: T,
}

impl<T: Scalar> Search<'_, T> {
    fn feasible(&self, i: usize) -> bool {
        let (a, b) = self.ends[i];
        !self.used[a] && !self.used[b]
    }

    fn upper_bound(&self, from: usize) -> T {
        // edges are sorted by descending weight
        let slots = self.free / 2;
        let extra = sum((from..self.edges.len())
            .filter(|&i| self.feasible(i))
            .take(slots)
            .map(|i| self.edges[i].weight()));
        self.current_weight + extra
    }

    fn branch(&mut self, from: usize) {
        if self.current_weight > self.best_weight {
            self.best_weight = self.current_weight;
            self.best = self.current.clone();
        }
        let Some(i) = (from..self.edges.len()).find(|&i| self.feasible(i)) else {
            return;
        };
        if !(self.upper_bound(i) > self.best_weight) {
            return;
        }
        let (a, b) = self.ends[i];
        self.used[a] = true;
        self.used[b] = true;
        self.free -= 2;
        self.current.push(i);
        let saved = self.current_weight;
        self.current_weight = saved + self.edges[i].weight();
        self.branch(i + 1);
        self.current_weight = saved;
        self.current.pop();
        self.free += 2;
        self.used[a] = false;
        self.used[b] = false;

        self.branch(i + 1);
    }
}
