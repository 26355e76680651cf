//! Running matchers over instances and collecting checked reports.

use std::collections::HashMap;

use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::baseline::BaselineState;
use crate::graph::{is_matching, Edge, VertexId};
use crate::matcher::{InsertionDecision, MatcherError, StreamingMatcher};
use crate::oracle::{max_weight_matching_with_limit, OracleError};
use crate::scalar::{sum, Scalar};
use crate::shadow::{MatcherState, Role, TraceEvent};
use crate::verifier::check_locally_k_exceeding;

use super::generator::{generate, GeneratorSpec, Instance};
use super::HarnessError;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Algorithm {
    Shadow { k: f64 },
    Baseline { gamma: f64 },
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Shadow { .. } => "shadow",
            Algorithm::Baseline { .. } => "baseline",
        }
    }

    pub fn param(&self) -> f64 {
        match *self {
            Algorithm::Shadow { k } => k,
            Algorithm::Baseline { gamma } => gamma,
        }
    }

    /// Upper bound on stored edges for a graph with `n` vertices.
    pub fn memory_bound(&self, n: usize) -> usize {
        match self {
            Algorithm::Shadow { .. } => 3 * (n / 2),
            Algorithm::Baseline { .. } => n / 2,
        }
    }
}

/// Which stream orders to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrderPlan {
    /// The instance's own order, reported with order seed 0.
    Given,
    /// `count` seeded shuffles; the order seed is derived from `seed` and the index.
    Random { count: usize, seed: u64 },
    /// Every permutation; the order seed is the permutation's index.
    Exhaustive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub algorithms: Vec<Algorithm>,
    pub orders: OrderPlan,
    /// Edge limit for the exact oracle; `None` skips it.
    pub oracle_limit: Option<usize>,
    /// Run the allocation-function check on every shadow insertion.
    pub verify: bool,
}

/// One algorithm on one stream order, with all per-step checks tallied.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub instance_id: String,
    pub order_seed: u64,
    pub algorithm: String,
    pub k_or_gamma: f64,
    pub vertices: usize,
    pub edges: usize,
    pub final_weight: f64,
    pub opt_weight: Option<f64>,
    pub ratio: Option<f64>,
    /// Set when the oracle was requested but the instance was too large.
    pub oracle_skipped: bool,
    pub insertions: u64,
    pub max_stored_edges: usize,
    pub memory_bound: usize,
    pub max_candidates: usize,
    pub max_touched: usize,
    pub verifier_passes: u64,
    pub verifier_failures: u64,
    /// Output is a matching made of streamed edges with their streamed weights.
    pub valid_output: bool,
    /// Insertions that did not strictly increase the matching weight.
    pub monotonicity_failures: u64,
    /// Steps whose decision was not the best candidate on an independent rescan.
    pub maximality_failures: u64,
    /// Steps after which the matcher state broke a structural invariant.
    pub invariant_failures: u64,
}

impl RunReport {
    pub fn memory_ok(&self) -> bool {
        self.max_stored_edges <= self.memory_bound
    }

    pub fn work_ok(&self) -> bool {
        self.max_candidates <= 7 && self.max_touched <= 7
    }

    /// Number of failed checks of any kind.
    pub fn failures(&self) -> u64 {
        self.verifier_failures
            + self.monotonicity_failures
            + self.maximality_failures
            + self.invariant_failures
            + u64::from(!self.valid_output)
            + u64::from(!self.memory_ok())
            + u64::from(!self.work_ok())
    }
}

/// `w(M*) / w(M)`, with `0 / 0 = 1`.
pub fn ratio(opt: f64, found: f64) -> f64 {
    if opt == 0.0 && found == 0.0 {
        1.0
    } else {
        opt / found
    }
}

fn exact<T: Scalar>(edges: &[Edge<T>]) -> BigRational {
    edges
        .iter()
        .map(|e| e.weight().to_rational().expect("finite weight"))
        .sum()
}

/// Strict weight increase of an insertion, decided exactly.
pub fn strictly_increases<T: Scalar>(d: &InsertionDecision<T>) -> bool {
    exact(&d.chosen) > exact(&d.removed)
}

/// Recomputes the best gain of a step from its neighborhood snapshot alone
/// and checks the recorded decision against it.
pub fn decision_is_maximal<T: Scalar>(event: &TraceEvent<T>, k: T) -> bool {
    let s = &event.neighborhood;
    let mut free: Vec<Edge<T>> = [Role::Y1Y2, Role::A1G1, Role::A2G2]
        .into_iter()
        .filter_map(|r| s.edge(r))
        .collect();
    free.sort();
    free.dedup();
    let mut matched: Vec<Edge<T>> = [Role::G1Y1, Role::A1C1, Role::G2Y2, Role::A2C2]
        .into_iter()
        .filter_map(|r| s.edge(r))
        .collect();
    matched.sort();
    matched.dedup();

    let mut best: Option<(T, Vec<Edge<T>>)> = None;
    let mut gains = Vec::new();
    for mask in 1usize..(1 << free.len()) {
        let set: Vec<Edge<T>> = (0..free.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| free[i])
            .collect();
        let disjoint = set
            .iter()
            .all(|a| set.iter().filter(|b| *b != a).all(|b| a.shared_vertex(b).is_none()));
        if !disjoint {
            continue;
        }
        let removed: Vec<Edge<T>> = matched
            .iter()
            .copied()
            .filter(|m| set.iter().any(|a| a.touches(m)))
            .collect();
        let r = sum(set.iter().map(Edge::weight)) - k * sum(removed.iter().map(Edge::weight));
        gains.push((r, set.clone()));
        if best.as_ref().is_none_or(|(b, _)| r > *b) {
            best = Some((r, set));
        }
    }
    let Some((best_gain, _)) = best else {
        return false;
    };
    let chosen_gain = gains
        .iter()
        .find(|(_, set)| *set == event.decision.chosen)
        .map(|(r, _)| *r);
    chosen_gain == Some(best_gain)
        && event.decision.gain == best_gain
        && event.decision.inserted == (best_gain > T::zero())
        && event.candidates.len() == gains.len()
}

fn output_valid(matching: &[Edge<f64>], streamed: &HashMap<(VertexId, VertexId), f64>) -> bool {
    is_matching(matching)
        && matching.iter().all(|e| {
            streamed
                .get(&e.key())
                .is_some_and(|w| w.to_bits() == e.weight().to_bits())
        })
}

struct Tally {
    verifier_passes: u64,
    verifier_failures: u64,
    monotonicity_failures: u64,
    maximality_failures: u64,
    invariant_failures: u64,
}

fn run_shadow(k: f64, order: &[Edge<f64>], verify: bool) -> Result<(MatcherState<f64>, Tally), MatcherError> {
    let mut state = MatcherState::new(k)?;
    let mut tally = Tally {
        verifier_passes: 0,
        verifier_failures: 0,
        monotonicity_failures: 0,
        maximality_failures: 0,
        invariant_failures: 0,
    };
    for (i, e) in order.iter().enumerate() {
        let event = state.process_edge_traced(i, *e)?;
        if state.check_invariants().is_err() {
            tally.invariant_failures += 1;
        }
        if !decision_is_maximal(&event, k) {
            tally.maximality_failures += 1;
        }
        if event.decision.inserted {
            if !strictly_increases(&event.decision) {
                tally.monotonicity_failures += 1;
            }
            if verify {
                match check_locally_k_exceeding(&event.decision, k) {
                    Ok(c) if c.feasible => tally.verifier_passes += 1,
                    _ => tally.verifier_failures += 1,
                }
            }
        }
    }
    Ok((state, tally))
}

fn run_baseline(gamma: f64, order: &[Edge<f64>]) -> Result<(BaselineState<f64>, Tally), MatcherError> {
    let mut state = BaselineState::new(gamma)?;
    let mut monotonicity_failures = 0;
    for e in order {
        let d = state.process_edge(*e)?;
        if d.inserted && !strictly_increases(&d) {
            monotonicity_failures += 1;
        }
    }
    let tally = Tally {
        verifier_passes: 0,
        verifier_failures: 0,
        monotonicity_failures,
        maximality_failures: 0,
        invariant_failures: u64::from(!is_matching(&state.matching_edges())),
    };
    Ok((state, tally))
}

/// Runs one algorithm on one order of `instance` and checks everything checkable.
pub fn execute_run(
    instance: &Instance,
    order: &[Edge<f64>],
    order_seed: u64,
    algorithm: Algorithm,
    opt_weight: Option<f64>,
    oracle_skipped: bool,
    verify: bool,
) -> Result<RunReport, HarnessError> {
    let (matching, stats, tally) = match algorithm {
        Algorithm::Shadow { k } => {
            let (s, t) = run_shadow(k, order, verify)?;
            (s.matching_edges(), s.stats(), t)
        }
        Algorithm::Baseline { gamma } => {
            let (s, t) = run_baseline(gamma, order)?;
            (s.matching_edges(), s.stats(), t)
        }
    };
    let streamed: HashMap<(VertexId, VertexId), f64> = order.iter().map(|e| (e.key(), e.weight())).collect();
    let final_weight = sum(matching.iter().map(Edge::weight));
    let n = instance.graph.vertex_count();
    Ok(RunReport {
        instance_id: instance.id.clone(),
        order_seed,
        algorithm: algorithm.name().to_string(),
        k_or_gamma: algorithm.param(),
        vertices: n,
        edges: order.len(),
        final_weight,
        opt_weight,
        ratio: opt_weight.map(|opt| ratio(opt, final_weight)),
        oracle_skipped,
        insertions: stats.insertions,
        max_stored_edges: stats.max_stored_edges,
        memory_bound: algorithm.memory_bound(n),
        max_candidates: stats.max_candidates,
        max_touched: stats.max_touched,
        verifier_passes: tally.verifier_passes,
        verifier_failures: tally.verifier_failures,
        valid_output: output_valid(&matching, &streamed),
        monotonicity_failures: tally.monotonicity_failures,
        maximality_failures: tally.maximality_failures,
        invariant_failures: tally.invariant_failures,
    })
}

/// SplitMix64 step, used to derive per-order seeds.
pub fn mix_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// All permutations of `items` in lexicographic order of positions.
pub fn permutations<T: Copy>(items: &[T]) -> Vec<Vec<T>> {
    let mut idx: Vec<usize> = (0..items.len()).collect();
    let mut out = vec![idx.iter().map(|&i| items[i]).collect::<Vec<T>>()];
    loop {
        let Some(i) = (1..idx.len()).rev().find(|&i| idx[i - 1] < idx[i]) else {
            return out;
        };
        let j = (i..idx.len())
            .rev()
            .find(|&j| idx[j] > idx[i - 1])
            .expect("pivot exists");
        idx.swap(i - 1, j);
        idx[i..].reverse();
        out.push(idx.iter().map(|&i| items[i]).collect());
    }
}

/// The stream orders selected by `plan`, each with its order seed.
pub fn stream_orders(instance: &Instance, plan: OrderPlan) -> Vec<(u64, Vec<Edge<f64>>)> {
    match plan {
        OrderPlan::Given => vec![(0, instance.order.clone())],
        OrderPlan::Random { count, seed } => (0..count as u64)
            .map(|i| {
                let order_seed = mix_seed(seed, i);
                let mut order = instance.order.clone();
                order.shuffle(&mut ChaCha8Rng::seed_from_u64(order_seed));
                (order_seed, order)
            })
            .collect(),
        OrderPlan::Exhaustive => permutations(&instance.order)
            .into_iter()
            .enumerate()
            .map(|(i, o)| (i as u64, o))
            .collect(),
    }
}

/// Oracle weight for an instance: `(weight, skipped_for_capacity)`.
pub fn oracle_weight(instance: &Instance, limit: Option<usize>) -> Result<(Option<f64>, bool), HarnessError> {
    let Some(limit) = limit else {
        return Ok((None, false));
    };
    match max_weight_matching_with_limit(&instance.graph, limit) {
        Ok(r) => Ok((Some(r.weight), false)),
        Err(OracleError::Capacity { edges, limit }) => {
            log::warn!(
                "{}: {edges} edges exceed oracle limit {limit}; ratio not computed",
                instance.id
            );
            Ok((None, true))
        }
        Err(e) => Err(e.into()),
    }
}

/// Runs every configured algorithm on every selected order of `instance`.
/// Reports come out order-major, algorithm-minor.
pub fn run_instance(instance: &Instance, config: &ExperimentConfig) -> Result<Vec<RunReport>, HarnessError> {
    let (opt, skipped) = oracle_weight(instance, config.oracle_limit)?;
    let mut reports = Vec::new();
    for (order_seed, order) in stream_orders(instance, config.orders) {
        for &algorithm in &config.algorithms {
            reports.push(execute_run(
                instance,
                &order,
                order_seed,
                algorithm,
                opt,
                skipped,
                config.verify,
            )?);
        }
    }
    Ok(reports)
}

/// Worst and mean ratio per algorithm setting.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub algorithm: String,
    pub k_or_gamma: f64,
    pub runs: usize,
    pub ratio_runs: usize,
    pub worst_ratio: Option<f64>,
    pub mean_ratio: Option<f64>,
    pub failures: u64,
}

pub fn aggregate(reports: &[RunReport]) -> Vec<Aggregate> {
    let mut out: Vec<Aggregate> = Vec::new();
    for r in reports {
        let idx = match out
            .iter()
            .position(|a| a.algorithm == r.algorithm && a.k_or_gamma.to_bits() == r.k_or_gamma.to_bits())
        {
            Some(i) => i,
            None => {
                out.push(Aggregate {
                    algorithm: r.algorithm.clone(),
                    k_or_gamma: r.k_or_gamma,
                    runs: 0,
                    ratio_runs: 0,
                    worst_ratio: None,
                    mean_ratio: None,
                    failures: 0,
                });
                out.len() - 1
            }
        };
        let a = &mut out[idx];
        a.runs += 1;
        a.failures += r.failures();
        if let Some(x) = r.ratio {
            a.ratio_runs += 1;
            a.worst_ratio = Some(a.worst_ratio.map_or(x, |w| w.max(x)));
            // running sum, divided below
            a.mean_ratio = Some(a.mean_ratio.unwrap_or(0.0) + x);
        }
    }
    for a in &mut out {
        if let Some(total) = a.mean_ratio {
            a.mean_ratio = Some(total / a.ratio_runs as f64);
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct Experiment {
    pub instance: Instance,
    pub reports: Vec<RunReport>,
    pub aggregates: Vec<Aggregate>,
}

/// Generates the instance for `spec` and runs the configured comparison on it.
pub fn run_experiment(spec: &GeneratorSpec, config: &ExperimentConfig) -> Result<Experiment, HarnessError> {
    let instance = generate(spec)?;
    let reports = run_instance(&instance, config)?;
    let aggregates = aggregate(&reports);
    Ok(Experiment {
        instance,
        reports,
        aggregates,
    })
}
