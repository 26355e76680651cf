//! Seeded instance generators.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::graph::{Edge, EdgeStream, VertexId};
use crate::oracle::DenseGraph;

use super::HarnessError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum GraphKind {
    /// Erdos-Renyi `G(n, p)`.
    Gnp {
        p: f64,
    },
    Complete,
    Path,
    Cycle,
    /// Path `0-1-...-(n-1)` with weights `1, q, q^2, ...` streamed in
    /// increasing order, the classic bad case for irrevocable replacement.
    GeometricChain {
        q: f64,
    },
    /// Fixed stream whose last edge triggers a two-edge insertion through a shadow edge.
    ShadowGadget,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum WeightDist {
    Uniform {
        lo: f64,
        hi: f64,
    },
    IntegerUniform {
        lo: u32,
        hi: u32,
    },
    /// `q^j` with `j` uniform in `0..=max_exp`.
    PowersOf {
        q: f64,
        max_exp: u32,
    },
    /// One weight per edge in construction order.
    Explicit(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub kind: GraphKind,
    pub n: usize,
    pub weights: WeightDist,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(kind: GraphKind, n: usize, weights: WeightDist, seed: u64) -> Self {
        GeneratorSpec { kind, n, weights, seed }
    }

    pub fn id(&self) -> String {
        let kind = match &self.kind {
            GraphKind::Gnp { p } => format!("gnp-p{p}"),
            GraphKind::Complete => "complete".into(),
            GraphKind::Path => "path".into(),
            GraphKind::Cycle => "cycle".into(),
            GraphKind::GeometricChain { q } => format!("geometric-chain-q{q}"),
            GraphKind::ShadowGadget => "shadow-gadget".into(),
        };
        format!("{kind}-n{}-s{}", self.n, self.seed)
    }
}

/// A generated graph and the order in which its edges are streamed.
#[derive(Clone, Debug)]
pub struct Instance {
    pub id: String,
    pub graph: DenseGraph<f64>,
    pub order: Vec<Edge<f64>>,
}

impl Instance {
    pub fn new(id: impl Into<String>, graph: DenseGraph<f64>, order: Vec<Edge<f64>>) -> Self {
        Instance {
            id: id.into(),
            graph,
            order,
        }
    }

    pub fn stream(&self) -> EdgeStream<f64> {
        EdgeStream::from_edges(self.order.clone(), self.id.clone())
    }
}

/// Vertices of the gadget stream, named by the role they play at its last edge.
pub mod gadget {
    pub const Y1: u64 = 1;
    pub const Y2: u64 = 2;
    pub const G1: u64 = 3;
    pub const G2: u64 = 4;
    pub const A1: u64 = 5;
    pub const C1: u64 = 6;
    pub const A2: u64 = 7;
    pub const C2: u64 = 8;
}

/// Stream (for `k = 1.5`) ending in the configuration where the input edge
/// `y1y2` and the shadow edge `a1g1` are inserted together, displacing
/// `a1c1`, `g1y1` and `g2y2`. All seven neighborhood edges are distinct.
pub fn shadow_gadget_stream() -> Vec<Edge<f64>> {
    use gadget::*;
    let e = |u, v, w| Edge::new(u, v, w).expect("valid gadget edge");
    vec![
        e(A1, C1, 4.0),
        e(Y2, G2, 4.0),
        e(A1, G1, 15.0),
        // takes a1c1 back in and leaves a1g1 as the shadow edge at g1
        e(Y1, G1, 21.0),
        e(G2, A2, 8.0),
        // re-inserts g2y2, a2g2 becomes the shadow edge at g2
        e(A2, C2, 19.0),
        e(Y1, Y2, 29.0),
    ]
}

fn draw_weights(dist: &WeightDist, count: usize, rng: &mut ChaCha8Rng) -> Result<Vec<f64>, HarnessError> {
    let invalid = |msg: String| Err(HarnessError::InvalidSpec(msg));
    match dist {
        WeightDist::Uniform { lo, hi } => {
            if !(*lo > 0.0 && hi > lo && hi.is_finite()) {
                return invalid(format!("uniform weights need 0 < lo < hi, got {lo}..{hi}"));
            }
            Ok((0..count).map(|_| rng.gen_range(*lo..*hi)).collect())
        }
        WeightDist::IntegerUniform { lo, hi } => {
            if !(*lo >= 1 && hi >= lo) {
                return invalid(format!("integer weights need 1 <= lo <= hi, got {lo}..={hi}"));
            }
            Ok((0..count).map(|_| rng.gen_range(*lo..=*hi) as f64).collect())
        }
        WeightDist::PowersOf { q, max_exp } => {
            if !(*q > 0.0 && q.is_finite()) {
                return invalid(format!("power base must be positive, got {q}"));
            }
            Ok((0..count).map(|_| q.powi(rng.gen_range(0..=*max_exp) as i32)).collect())
        }
        WeightDist::Explicit(ws) => {
            if ws.len() != count {
                return invalid(format!("{} explicit weights for {count} edges", ws.len()));
            }
            Ok(ws.clone())
        }
    }
}

fn pairs(spec: &GeneratorSpec, rng: &mut ChaCha8Rng) -> Result<Vec<(u64, u64)>, HarnessError> {
    let n = spec.n as u64;
    Ok(match &spec.kind {
        GraphKind::Gnp { p } => {
            if !(0.0..=1.0).contains(p) {
                return Err(HarnessError::InvalidSpec(format!(
                    "edge probability {p} outside [0, 1]"
                )));
            }
            let mut out = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(*p) {
                        out.push((u, v));
                    }
                }
            }
            out
        }
        GraphKind::Complete => (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect(),
        GraphKind::Path | GraphKind::GeometricChain { .. } => (1..n).map(|v| (v - 1, v)).collect(),
        GraphKind::Cycle => {
            if n < 3 {
                return Err(HarnessError::InvalidSpec("a cycle needs n >= 3".into()));
            }
            let mut out: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
            out.push((n - 1, 0));
            out
        }
        GraphKind::ShadowGadget => unreachable!("handled by generate"),
    })
}

/// Builds the instance described by `spec`. Identical specs give identical instances.
pub fn generate(spec: &GeneratorSpec) -> Result<Instance, HarnessError> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let id = spec.id();
    let (vertices, order) = match &spec.kind {
        GraphKind::ShadowGadget => {
            let order = shadow_gadget_stream();
            (Vec::new(), order)
        }
        GraphKind::GeometricChain { q } => {
            if !(*q > 1.0 && q.is_finite()) {
                return Err(HarnessError::InvalidSpec(format!("chain ratio must exceed 1, got {q}")));
            }
            let order = pairs(spec, &mut rng)?
                .into_iter()
                .enumerate()
                .map(|(i, (u, v))| Edge::new(u, v, q.powi(i as i32)))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| HarnessError::InvalidSpec(e.to_string()))?;
            ((0..spec.n as u64).map(VertexId).collect(), order)
        }
        _ => {
            let pairs = pairs(spec, &mut rng)?;
            let weights = draw_weights(&spec.weights, pairs.len(), &mut rng)?;
            let mut order = pairs
                .into_iter()
                .zip(weights)
                .map(|((u, v), w)| Edge::new(u, v, w))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| HarnessError::InvalidSpec(e.to_string()))?;
            order.shuffle(&mut rng);
            ((0..spec.n as u64).map(VertexId).collect(), order)
        }
    };
    let graph = DenseGraph::with_vertices(vertices, order.clone())?;
    Ok(Instance::new(id, graph, order))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn keys(edges: &[Edge<f64>]) -> Vec<(u64, u64, f64)> {
        edges.iter().map(|e| (e.u().0, e.v().0, e.weight())).collect()
    }

    #[test]
    fn explicit_path() {
        let spec = GeneratorSpec::new(GraphKind::Path, 4, WeightDist::Explicit(vec![1.0, 5.0, 1.0]), 3);
        let inst = generate(&spec).unwrap();
        assert_eq!(inst.order.len(), 3);
        let mut sorted = keys(&inst.order);
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(sorted, vec![(0, 1, 1.0), (1, 2, 5.0), (2, 3, 1.0)]);
    }

    #[test]
    fn gnp_is_deterministic() {
        let spec = GeneratorSpec::new(
            GraphKind::Gnp { p: 0.5 },
            8,
            WeightDist::Uniform { lo: 1.0, hi: 10.0 },
            7,
        );
        let a = generate(&spec).unwrap();
        let b = generate(&spec).unwrap();
        assert_eq!(keys(&a.order), keys(&b.order));
        let c = generate(&GeneratorSpec { seed: 8, ..spec }).unwrap();
        assert_ne!(keys(&a.order), keys(&c.order));
    }

    #[test]
    fn geometric_chain_is_increasing() {
        let spec = GeneratorSpec::new(GraphKind::GeometricChain { q: 2.0 }, 6, WeightDist::Explicit(vec![]), 0);
        let inst = generate(&spec).unwrap();
        assert_eq!(
            keys(&inst.order),
            vec![(0, 1, 1.0), (1, 2, 2.0), (2, 3, 4.0), (3, 4, 8.0), (4, 5, 16.0)]
        );
    }

    #[test]
    fn complete_and_cycle_sizes() {
        let w = WeightDist::IntegerUniform { lo: 1, hi: 3 };
        assert_eq!(
            generate(&GeneratorSpec::new(GraphKind::Complete, 5, w.clone(), 1))
                .unwrap()
                .order
                .len(),
            10
        );
        assert_eq!(
            generate(&GeneratorSpec::new(GraphKind::Cycle, 5, w.clone(), 1))
                .unwrap()
                .order
                .len(),
            5
        );
        assert!(generate(&GeneratorSpec::new(GraphKind::Cycle, 2, w, 1)).is_err());
    }

    #[test]
    fn invalid_parameters() {
        let bad = [
            GeneratorSpec::new(
                GraphKind::Gnp { p: 1.5 },
                4,
                WeightDist::Uniform { lo: 1.0, hi: 2.0 },
                0,
            ),
            GeneratorSpec::new(GraphKind::Path, 4, WeightDist::Uniform { lo: 0.0, hi: 2.0 }, 0),
            GeneratorSpec::new(GraphKind::Path, 4, WeightDist::Explicit(vec![1.0]), 0),
            GeneratorSpec::new(GraphKind::GeometricChain { q: 1.0 }, 4, WeightDist::Explicit(vec![]), 0),
        ];
        for spec in bad {
            assert!(generate(&spec).is_err(), "{spec:?}");
        }
    }

    #[test]
    fn isolated_vertices_count() {
        let spec = GeneratorSpec::new(
            GraphKind::Gnp { p: 0.0 },
            5,
            WeightDist::Uniform { lo: 1.0, hi: 2.0 },
            0,
        );
        let inst = generate(&spec).unwrap();
        assert_eq!(inst.graph.vertex_count(), 5);
        assert!(inst.order.is_empty());
    }
}
