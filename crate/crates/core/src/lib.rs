//! One-pass semi-streaming maximum weight matching.
//!
//! The crate provides the shadow-edge matcher ([`shadow`]), the classic
//! replace-if-heavier matcher ([`baseline`]), an exact branch-and-bound
//! oracle for small graphs ([`oracle`]), an exact allocation-function
//! verifier ([`verifier`]), the worst-case ratio formula ([`bound`]) and an
//! experiment harness ([`harness`]).
//!
//! The algorithmic modules are generic over [`Scalar`]; the aliases below
//! fix the scalar for the common cases.
//!
//! ```
//! use shadow_matching::{Edge, ShadowMatcher64, StreamingMatcher};
//!
//! let mut m = ShadowMatcher64::new(1.717).unwrap();
//! for (u, v, w) in [(1u64, 2u64, 1.0), (2, 3, 10.0), (3, 4, 1.0)] {
//!     m.process_edge(Edge::new(u, v, w).unwrap()).unwrap();
//! }
//! assert_eq!(m.matching_weight(), 10.0);
//! ```

// `!(x > y)` guards deliberately reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baseline;
pub mod bound;
pub mod graph;
pub mod harness;
pub mod matcher;
pub mod oracle;
pub mod scalar;
pub mod shadow;
pub mod trace;
pub mod verifier;

pub use graph::{DuplicatePolicy, Edge, EdgeStream, GraphError, VertexId, Weight};
pub use matcher::{InsertionDecision, MatcherError, MatcherStats, StreamingMatcher};
pub use scalar::Scalar;

pub use num_rational::Rational64;

pub type Edge64 = Edge<f64>;
pub type Edge32 = Edge<f32>;
pub type EdgeQ = Edge<Rational64>;

pub type ShadowMatcher64 = shadow::MatcherState<f64>;
pub type ShadowMatcher32 = shadow::MatcherState<f32>;
pub type ShadowMatcherQ = shadow::MatcherState<Rational64>;

pub type BaselineMatcher64 = baseline::BaselineState<f64>;
pub type BaselineMatcher32 = baseline::BaselineState<f32>;
pub type BaselineMatcherQ = baseline::BaselineState<Rational64>;

pub type DenseGraph64 = oracle::DenseGraph<f64>;
pub type EdgeStream64 = EdgeStream<f64>;
pub type Decision64 = InsertionDecision<f64>;
