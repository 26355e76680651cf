//! Exact check that an inserted augmenting set is locally k-exceeding.
//!
//! For an inserted set `A` with displaced matching edges `M(A)`, covering
//! the vertex set `B`, we look for `f: B -> [0, 1]` with
//!
//! * `f(a) * w(M(a)) + f(b) * w(M(b)) <= w(ab) / k` for every `ab` in `A`,
//! * `f(c) + f(d) >= 1` for every `cd` in `M(A)` (with `f = 0` outside `B`),
//!
//! where `w(M(x))` is the weight of the displaced edge covering `x`, or 0.
//! All weights are converted to exact rationals first, so the verdict never
//! depends on rounding.

mod fourier_motzkin;

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

pub use fourier_motzkin::{Inequality, LinearSystem};

use crate::graph::{Edge, VertexId};
use crate::matcher::InsertionDecision;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifierError {
    #[error("decision was not inserted")]
    NotInserted,
    #[error("augmenting set of size {chosen} with {removed} removed edges exceeds the neighborhood bound")]
    TooLarge { chosen: usize, removed: usize },
    #[error("value {0} has no exact rational form")]
    NotRational(String),
}

/// Verdict of the allocation-function search for one inserted set.
#[derive(Clone, Debug, PartialEq)]
pub struct AllocationCheck<T> {
    pub chosen: Vec<Edge<T>>,
    pub removed: Vec<Edge<T>>,
    pub k: BigRational,
    /// Vertices covered by the chosen set, ascending.
    pub covered: Vec<VertexId>,
    pub feasible: bool,
    pub witness: Option<BTreeMap<VertexId, BigRational>>,
}

fn rational<T: Scalar>(x: T) -> Result<BigRational, VerifierError> {
    x.to_rational().ok_or_else(|| VerifierError::NotRational(x.to_string()))
}

/// Builds the constraint system over the covered vertices of `chosen`.
pub fn allocation_system<T: Scalar>(
    chosen: &[Edge<T>],
    removed: &[Edge<T>],
    k: &BigRational,
) -> Result<(Vec<VertexId>, LinearSystem), VerifierError> {
    let mut covered: Vec<VertexId> = chosen.iter().flat_map(Edge::endpoints).collect();
    covered.sort();
    covered.dedup();
    let index: BTreeMap<VertexId, usize> = covered.iter().enumerate().map(|(i, &v)| (v, i)).collect();

    let mut displaced: BTreeMap<VertexId, BigRational> = BTreeMap::new();
    for d in removed {
        let w = rational(d.weight())?;
        displaced.insert(d.u(), w.clone());
        displaced.insert(d.v(), w);
    }
    let load = |x: VertexId| displaced.get(&x).cloned().unwrap_or_else(BigRational::zero);
    let one = || BigRational::from_integer(1.into());

    let mut system = LinearSystem::new(covered.len());
    for i in 0..covered.len() {
        system.push_ge(&[(i, one())], BigRational::zero());
        system.push_le(&[(i, one())], one());
    }
    for ab in chosen {
        let cap = rational(ab.weight())? / k;
        let terms = [(index[&ab.u()], load(ab.u())), (index[&ab.v()], load(ab.v()))];
        system.push_le(&terms, cap);
    }
    for cd in removed {
        let terms: Vec<(usize, BigRational)> = cd
            .endpoints()
            .into_iter()
            .filter_map(|x| index.get(&x).map(|&i| (i, one())))
            .collect();
        system.push_ge(&terms, one());
    }
    Ok((covered, system))
}

/// Decides whether the inserted set of `decision` admits an allocation function.
pub fn check_locally_k_exceeding<T: Scalar>(
    decision: &InsertionDecision<T>,
    k: T,
) -> Result<AllocationCheck<T>, VerifierError> {
    if !decision.inserted {
        return Err(VerifierError::NotInserted);
    }
    if decision.chosen.len() > 3 || decision.removed.len() > 4 {
        return Err(VerifierError::TooLarge {
            chosen: decision.chosen.len(),
            removed: decision.removed.len(),
        });
    }
    check_allocation(&decision.chosen, &decision.removed, k)
}

/// Same check for an arbitrary set and displaced edges, without the size guard.
pub fn check_allocation<T: Scalar>(
    chosen: &[Edge<T>],
    removed: &[Edge<T>],
    k: T,
) -> Result<AllocationCheck<T>, VerifierError> {
    let k = rational(k)?;
    let (covered, system) = allocation_system(chosen, removed, &k)?;
    let solution = system.solve();
    let witness = solution.map(|x| covered.iter().copied().zip(x).collect::<BTreeMap<_, _>>());
    Ok(AllocationCheck {
        chosen: chosen.to_vec(),
        removed: removed.to_vec(),
        k,
        covered,
        feasible: witness.is_some(),
        witness,
    })
}
