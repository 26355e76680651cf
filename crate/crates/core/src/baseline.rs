//! Replace-if-heavier one-pass matcher.
//!
//! An arriving edge replaces the (at most two) matching edges it touches
//! when its weight exceeds `(1 + gamma)` times their total weight. Replaced
//! edges are dropped for good. This is the classic family the shadow
//! matcher improves on; the rule is a reconstruction, and the two presets
//! are labeled as such.

use std::collections::HashMap;

use crate::graph::{Edge, VertexId};
use crate::matcher::{InsertionDecision, MatcherError, MatcherStats, StreamingMatcher};
use crate::scalar::{sum, Scalar};

/// Named choices of `gamma`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GammaPreset {
    /// `gamma = 1`, the ratio-6 variant.
    RatioSix,
    /// `gamma = 1/sqrt(2)`, the `3 + 2*sqrt(2)` (about 5.828) variant.
    RatioFivePointEightTwoEight,
}

impl GammaPreset {
    pub const ALL: [GammaPreset; 2] = [GammaPreset::RatioSix, GammaPreset::RatioFivePointEightTwoEight];

    pub fn gamma(self) -> f64 {
        match self {
            GammaPreset::RatioSix => 1.0,
            GammaPreset::RatioFivePointEightTwoEight => std::f64::consts::FRAC_1_SQRT_2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            GammaPreset::RatioSix => "ratio-6 baseline",
            GammaPreset::RatioFivePointEightTwoEight => "5.828 baseline",
        }
    }
}

#[derive(Clone, Debug)]
pub struct BaselineState<T> {
    gamma: T,
    matching: HashMap<VertexId, Edge<T>>,
    matching_len: usize,
    stats: MatcherStats,
}

impl<T: Scalar> BaselineState<T> {
    pub fn new(gamma: T) -> Result<Self, MatcherError> {
        if !gamma.is_finite_value() || gamma < T::zero() {
            return Err(MatcherError::InvalidGamma(gamma.to_string()));
        }
        Ok(BaselineState {
            gamma,
            matching: HashMap::new(),
            matching_len: 0,
            stats: MatcherStats::default(),
        })
    }

    pub fn with_preset(preset: GammaPreset) -> Self {
        let gamma = T::from_f64(preset.gamma()).expect("preset representable");
        Self::new(gamma).expect("presets are valid")
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }

    pub fn matched_at(&self, x: VertexId) -> Option<Edge<T>> {
        self.matching.get(&x).copied()
    }
}

impl<T: Scalar> StreamingMatcher<T> for BaselineState<T> {
    fn process_edge(&mut self, e: Edge<T>) -> Result<InsertionDecision<T>, MatcherError> {
        if self.matched_at(e.u()).is_some_and(|m| m == e) {
            return Err(MatcherError::EdgeAlreadyStored(e.u(), e.v()));
        }
        let mut conflicts: Vec<Edge<T>> = e.endpoints().into_iter().filter_map(|x| self.matched_at(x)).collect();
        conflicts.sort();
        conflicts.dedup();
        let threshold = (T::one() + self.gamma) * sum(conflicts.iter().map(Edge::weight));
        let inserted = e.weight() > threshold;
        if inserted {
            for c in &conflicts {
                self.matching.remove(&c.u());
                self.matching.remove(&c.v());
            }
            self.matching.insert(e.u(), e);
            self.matching.insert(e.v(), e);
            self.matching_len = self.matching_len + 1 - conflicts.len();
        }
        self.stats.edges_seen += 1;
        self.stats.insertions += inserted as u64;
        self.stats.max_candidates = self.stats.max_candidates.max(1);
        self.stats.max_touched = self.stats.max_touched.max(1 + conflicts.len());
        self.stats.max_stored_edges = self.stats.max_stored_edges.max(self.matching_len);
        Ok(InsertionDecision {
            chosen: vec![e],
            removed: conflicts,
            gain: e.weight() - threshold,
            inserted,
        })
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
        self.matching_len
    }

    fn stats(&self) -> MatcherStats {
        self.stats
    }
}
