//! One-pass weighted matching with shadow edges.
//!
//! Besides the matching `M`, the matcher remembers for every matched vertex
//! at most one edge that used to be in `M` and shares that vertex with the
//! matching edge now covering it (its *shadow edge*). For each arriving edge
//! `y1y2` it looks at the local neighborhood
//!
//! ```text
//!   a1c1 -- a1g1 -- g1y1 -- [y1y2] -- g2y2 -- a2g2 -- a2c2
//! ```
//!
//! where `g1y1`, `g2y2` are the matching edges at the endpoints of the input
//! edge, `a1g1`, `a2g2` are their shadow edges at the far endpoints, and
//! `a1c1`, `a2c2` are the matching edges covering `a1`, `a2`. Among the
//! pairwise non-adjacent subsets `A` of `{y1y2, a1g1, a2g2}` it picks the
//! one maximizing `r(A) = w(A) - k * w(M(A))`, and inserts it when
//! `r(A) > 0`. Displaced matching edges become shadow edges of the inserted
//! edges they touch.
//!
//! Missing edges in the neighborhood are simply absent (weight zero); in
//! particular an uncovered `y1` is handled like an uncovered `y2`.

use std::cmp::Ordering;
use std::collections::HashMap;

use thiserror::Error;

use crate::graph::{Edge, EdgeStream, GraphError, VertexId};
use crate::matcher::{InsertionDecision, MatcherError, MatcherStats, StreamingMatcher};
use crate::scalar::{sum, Scalar};

/// Role of an edge inside the neighborhood of an input edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    Y1Y2,
    G1Y1,
    A1G1,
    A1C1,
    G2Y2,
    A2G2,
    A2C2,
}

impl Role {
    pub const ALL: [Role; 7] = [
        Role::Y1Y2,
        Role::G1Y1,
        Role::A1G1,
        Role::A1C1,
        Role::G2Y2,
        Role::A2G2,
        Role::A2C2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Role::Y1Y2 => "y1y2",
            Role::G1Y1 => "g1y1",
            Role::A1G1 => "a1g1",
            Role::A1C1 => "a1c1",
            Role::G2Y2 => "g2y2",
            Role::A2G2 => "a2g2",
            Role::A2C2 => "a2c2",
        }
    }
}

/// The part of the neighborhood hanging off one endpoint `y` of the input edge.
#[derive(Clone, Debug, PartialEq)]
pub struct Side<T> {
    /// Matching edge `gy` covering `y`.
    pub matched: Option<Edge<T>>,
    pub g: Option<VertexId>,
    /// Shadow edge `ag` stored at `g` for `gy`.
    pub shadow: Option<Edge<T>>,
    pub a: Option<VertexId>,
    /// Matching edge `ac` covering `a`.
    pub far: Option<Edge<T>>,
}

impl<T> Side<T> {
    fn empty() -> Self {
        Side {
            matched: None,
            g: None,
            shadow: None,
            a: None,
            far: None,
        }
    }
}

/// The local subgraph examined for one input edge (at most seven edges).
#[derive(Clone, Debug, PartialEq)]
pub struct Neighborhood<T> {
    pub input: Edge<T>,
    pub y1: VertexId,
    pub y2: VertexId,
    pub side1: Side<T>,
    pub side2: Side<T>,
}

impl<T: Scalar> Neighborhood<T> {
    /// Every role with the edge bound to it. Distinct roles may share an edge.
    pub fn roles(&self) -> [(Role, Option<Edge<T>>); 7] {
        [
            (Role::Y1Y2, Some(self.input)),
            (Role::G1Y1, self.side1.matched),
            (Role::A1G1, self.side1.shadow),
            (Role::A1C1, self.side1.far),
            (Role::G2Y2, self.side2.matched),
            (Role::A2G2, self.side2.shadow),
            (Role::A2C2, self.side2.far),
        ]
    }

    pub fn edge(&self, role: Role) -> Option<Edge<T>> {
        self.roles()[role as usize].1
    }

    /// Distinct edges of the neighborhood, sorted by endpoints.
    pub fn distinct_edges(&self) -> Vec<Edge<T>> {
        let mut edges: Vec<Edge<T>> = self.roles().into_iter().filter_map(|(_, e)| e).collect();
        edges.sort();
        edges.dedup();
        edges
    }

    /// Distinct non-matching edges (`y1y2`, `a1g1`, `a2g2`), sorted by endpoints.
    pub fn candidate_edges(&self) -> Vec<Edge<T>> {
        let mut edges: Vec<Edge<T>> = [Some(self.input), self.side1.shadow, self.side2.shadow]
            .into_iter()
            .flatten()
            .collect();
        edges.sort();
        edges.dedup();
        edges
    }
}

/// All non-empty, pairwise vertex-disjoint subsets of the neighborhood's
/// non-matching edges, in subset-bitmask order over the sorted candidates.
pub fn enumerate_augmenting_sets<T: Scalar>(s: &Neighborhood<T>) -> Vec<Vec<Edge<T>>> {
    let candidates = s.candidate_edges();
    let mut sets = Vec::with_capacity(7);
    for mask in 1u32..(1 << candidates.len()) {
        let set: Vec<Edge<T>> = candidates
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, e)| *e)
            .collect();
        let disjoint = set
            .iter()
            .enumerate()
            .all(|(i, e)| set[i + 1..].iter().all(|f| !e.touches(f)));
        if disjoint {
            sets.push(set);
        }
    }
    sets
}

/// One evaluated augmenting set.
#[derive(Clone, Debug, PartialEq)]
pub struct CandidateEval<T> {
    pub edges: Vec<Edge<T>>,
    pub removed: Vec<Edge<T>>,
    pub gain: T,
}

impl<T: Scalar> CandidateEval<T> {
    pub fn weight(&self) -> T {
        sum(self.edges.iter().map(Edge::weight))
    }
}

fn cmp_scalar<T: Scalar>(a: T, b: T) -> Ordering {
    a.partial_cmp(&b).unwrap_or(Ordering::Equal)
}

/// Preference order between candidates: larger gain, then larger weight,
/// then fewer edges, then the lexicographically smaller edge list.
/// `Ordering::Greater` means `a` is preferred.
pub fn candidate_preference<T: Scalar>(a: &CandidateEval<T>, b: &CandidateEval<T>) -> Ordering {
    cmp_scalar(a.gain, b.gain)
        .then_with(|| cmp_scalar(a.weight(), b.weight()))
        .then_with(|| b.edges.len().cmp(&a.edges.len()))
        .then_with(|| {
            let ka = a.edges.iter().map(Edge::key);
            let kb = b.edges.iter().map(Edge::key);
            kb.cmp(ka)
        })
}

/// Everything recorded about one processed input edge.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceEvent<T> {
    pub index: usize,
    pub input: Edge<T>,
    pub neighborhood: Neighborhood<T>,
    pub candidates: Vec<CandidateEval<T>>,
    pub decision: InsertionDecision<T>,
    /// Distinct stored edges inspected while handling the input edge.
    pub touched: usize,
}

/// State of the shadow matcher: the matching plus one shadow slot per matched vertex.
#[derive(Clone, Debug)]
pub struct MatcherState<T> {
    k: T,
    matching: HashMap<VertexId, Edge<T>>,
    shadow_slots: HashMap<VertexId, Edge<T>>,
    // multiplicity of each shadow edge across slots (an edge may sit in two)
    shadow_refs: HashMap<(VertexId, VertexId), u8>,
    matching_len: usize,
    stats: MatcherStats,
}

impl<T: Scalar> MatcherState<T> {
    pub fn new(k: T) -> Result<Self, MatcherError> {
        if !k.is_finite_value() || !(k > T::one()) {
            return Err(MatcherError::InvalidK(k.to_string()));
        }
        Ok(MatcherState {
            k,
            matching: HashMap::new(),
            shadow_slots: HashMap::new(),
            shadow_refs: HashMap::new(),
            matching_len: 0,
            stats: MatcherStats::default(),
        })
    }

    /// Builds a state directly from a matching and shadow assignments
    /// `(vertex, shadow edge)`, validating every structural invariant.
    pub fn from_parts(
        k: T,
        matching: impl IntoIterator<Item = Edge<T>>,
        shadows: impl IntoIterator<Item = (VertexId, Edge<T>)>,
    ) -> Result<Self, MatcherError> {
        let mut state = Self::new(k)?;
        for e in matching {
            if state.matching.contains_key(&e.u()) || state.matching.contains_key(&e.v()) {
                return Err(MatcherError::Inconsistent(format!("edge {e} overlaps the matching")));
            }
            state.matching.insert(e.u(), e);
            state.matching.insert(e.v(), e);
            state.matching_len += 1;
        }
        for (x, s) in shadows {
            if state.shadow_slots.contains_key(&x) {
                return Err(MatcherError::Inconsistent(format!("two shadow edges at vertex {x}")));
            }
            state.set_slot(x, s);
        }
        state.check_invariants().map_err(MatcherError::Inconsistent)?;
        state.stats.max_stored_edges = state.stored_edge_count();
        Ok(state)
    }

    pub fn k(&self) -> T {
        self.k
    }

    pub fn matched_at(&self, x: VertexId) -> Option<Edge<T>> {
        self.matching.get(&x).copied()
    }

    pub fn shadow_at(&self, x: VertexId) -> Option<Edge<T>> {
        self.shadow_slots.get(&x).copied()
    }

    /// Shadow slots as `(vertex, edge)` pairs sorted by vertex.
    pub fn shadow_slots(&self) -> Vec<(VertexId, Edge<T>)> {
        let mut slots: Vec<_> = self.shadow_slots.iter().map(|(&x, &e)| (x, e)).collect();
        slots.sort_by_key(|&(x, _)| x);
        slots
    }

    pub fn matching_len(&self) -> usize {
        self.matching_len
    }

    /// Matching edges plus distinct shadow edges.
    pub fn stored_edge_count(&self) -> usize {
        self.matching_len + self.shadow_refs.len()
    }

    fn side(&self, y: VertexId) -> Side<T> {
        let Some(matched) = self.matched_at(y) else {
            return Side::empty();
        };
        let g = matched.other(y);
        let shadow = g.and_then(|g| self.shadow_at(g));
        let a = match (shadow, g) {
            (Some(s), Some(g)) => s.other(g),
            _ => None,
        };
        let far = a.and_then(|a| self.matched_at(a));
        Side {
            matched: Some(matched),
            g,
            shadow,
            a,
            far,
        }
    }

    /// Collects the neighborhood of an input edge.
    pub fn build_neighborhood(&self, e: Edge<T>) -> Neighborhood<T> {
        Neighborhood {
            input: e,
            y1: e.u(),
            y2: e.v(),
            side1: self.side(e.u()),
            side2: self.side(e.v()),
        }
    }

    /// `r(A) = w(A) - k * w(M(A))` together with `M(A)`.
    ///
    /// Both sums run over edges sorted by endpoints, so the floating-point
    /// result is reproducible from the sets alone.
    pub fn gain(&self, set: &[Edge<T>]) -> (T, Vec<Edge<T>>) {
        let mut removed: Vec<Edge<T>> = set
            .iter()
            .flat_map(|f| f.endpoints())
            .filter_map(|x| self.matched_at(x))
            .collect();
        removed.sort();
        removed.dedup();
        let mut sorted = set.to_vec();
        sorted.sort();
        let added = sum(sorted.iter().map(Edge::weight));
        let lost = sum(removed.iter().map(Edge::weight));
        (added - self.k * lost, removed)
    }

    fn set_slot(&mut self, x: VertexId, s: Edge<T>) {
        if let Some(old) = self.shadow_slots.insert(x, s) {
            self.release_shadow(old);
        }
        *self.shadow_refs.entry(s.key()).or_insert(0) += 1;
    }

    fn clear_slot(&mut self, x: VertexId) {
        if let Some(old) = self.shadow_slots.remove(&x) {
            self.release_shadow(old);
        }
    }

    fn release_shadow(&mut self, s: Edge<T>) {
        if let Some(count) = self.shadow_refs.get_mut(&s.key()) {
            *count -= 1;
            if *count == 0 {
                self.shadow_refs.remove(&s.key());
            }
        }
    }

    fn is_stored(&self, e: &Edge<T>) -> bool {
        e.endpoints()
            .into_iter()
            .any(|x| self.matched_at(x).is_some_and(|m| m == *e) || self.shadow_at(x).is_some_and(|s| s == *e))
    }

    /// Processes one input edge and returns the full record of the step.
    pub fn process_edge_traced(&mut self, index: usize, e: Edge<T>) -> Result<TraceEvent<T>, MatcherError> {
        if self.is_stored(&e) {
            return Err(MatcherError::EdgeAlreadyStored(e.u(), e.v()));
        }
        let neighborhood = self.build_neighborhood(e);
        let candidates: Vec<CandidateEval<T>> = enumerate_augmenting_sets(&neighborhood)
            .into_iter()
            .map(|edges| {
                let (gain, removed) = self.gain(&edges);
                CandidateEval { edges, removed, gain }
            })
            .collect();
        let best = candidates
            .iter()
            .reduce(|best, c| {
                if candidate_preference(c, best) == Ordering::Greater {
                    c
                } else {
                    best
                }
            })
            .expect("the input edge alone is always an augmenting set")
            .clone();

        let inserted = best.gain > T::zero();
        if inserted {
            self.apply(&best.edges, &best.removed);
        }

        let touched = neighborhood.distinct_edges().len();
        self.stats.edges_seen += 1;
        self.stats.insertions += inserted as u64;
        self.stats.max_candidates = self.stats.max_candidates.max(candidates.len());
        self.stats.max_touched = self.stats.max_touched.max(touched);
        self.stats.max_stored_edges = self.stats.max_stored_edges.max(self.stored_edge_count());

        let decision = InsertionDecision {
            chosen: best.edges,
            removed: best.removed,
            gain: best.gain,
            inserted,
        };
        Ok(TraceEvent {
            index,
            input: e,
            neighborhood,
            candidates,
            decision,
            touched,
        })
    }

    fn apply(&mut self, chosen: &[Edge<T>], removed: &[Edge<T>]) {
        for d in removed {
            self.clear_slot(d.u());
            self.clear_slot(d.v());
        }
        for d in removed {
            self.matching.remove(&d.u());
            self.matching.remove(&d.v());
        }
        for f in chosen {
            self.matching.insert(f.u(), *f);
            self.matching.insert(f.v(), *f);
        }
        self.matching_len = self.matching_len + chosen.len() - removed.len();
        for d in removed {
            for f in chosen {
                if let Some(x) = d.shared_vertex(f) {
                    self.set_slot(x, *d);
                }
            }
        }
    }

    /// Checks every structural invariant of the state; `Err` describes the first violation.
    pub fn check_invariants(&self) -> Result<(), String> {
        let mut count = 0;
        for (&x, m) in &self.matching {
            if !m.has_vertex(x) {
                return Err(format!("vertex {x} maps to non-incident edge {}", m.key().0));
            }
            let y = m.other(x).expect("incident");
            if self.matched_at(y) != Some(*m) {
                return Err(format!("matching edge at {x} is not registered at {y}"));
            }
            if x < y {
                count += 1;
            }
        }
        if count != self.matching_len {
            return Err(format!("matching size {} but counter {}", count, self.matching_len));
        }
        let mut refs: HashMap<(VertexId, VertexId), u8> = HashMap::new();
        for (&x, s) in &self.shadow_slots {
            let Some(m) = self.matched_at(x) else {
                return Err(format!("shadow slot at uncovered vertex {x}"));
            };
            if m.shared_vertex(s) != Some(x) || !s.has_vertex(x) {
                return Err(format!(
                    "shadow edge at {x} does not share exactly {x} with its matching edge"
                ));
            }
            if self.is_in_matching(s) {
                return Err(format!("shadow edge at {x} is also a matching edge"));
            }
            *refs.entry(s.key()).or_insert(0) += 1;
        }
        if refs != self.shadow_refs {
            return Err("shadow reference counts out of sync".to_string());
        }
        Ok(())
    }

    fn is_in_matching(&self, e: &Edge<T>) -> bool {
        self.matched_at(e.u()).is_some_and(|m| m == *e)
    }
}

impl<T: Scalar> StreamingMatcher<T> for MatcherState<T> {
    fn process_edge(&mut self, e: Edge<T>) -> Result<InsertionDecision<T>, MatcherError> {
        let index = self.stats.edges_seen as usize;
        self.process_edge_traced(index, e).map(|t| t.decision)
    }

    fn matching_edges(&self) -> Vec<Edge<T>> {
        let mut edges: Vec<Edge<T>> = self
            .matching
            .iter()
            .filter(|(&x, e)| x == e.u())
            .map(|(_, &e)| e)
            .collect();
        edges.sort();
        edges
    }

    fn stored_edges(&self) -> usize {
        self.stored_edge_count()
    }

    fn stats(&self) -> MatcherStats {
        self.stats
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Stream(#[from] GraphError),
    #[error(transparent)]
    Matcher(#[from] MatcherError),
}

/// Result of a full pass over a stream.
#[derive(Clone, Debug)]
pub struct RunOutput<T> {
    pub matching: Vec<Edge<T>>,
    pub weight: T,
    pub trace: Vec<TraceEvent<T>>,
    pub stats: MatcherStats,
}

/// Runs the shadow matcher over a stream in a single pass.
pub fn run<T: Scalar>(stream: EdgeStream<T>, k: T, trace: bool) -> Result<RunOutput<T>, RunError> {
    let mut state = MatcherState::new(k)?;
    let mut events = Vec::new();
    for (index, e) in stream.enumerate() {
        let event = state.process_edge_traced(index, e?)?;
        if trace {
            events.push(event);
        }
    }
    let matching = state.matching_edges();
    Ok(RunOutput {
        weight: state.matching_weight(),
        matching,
        trace: events,
        stats: state.stats(),
    })
}
