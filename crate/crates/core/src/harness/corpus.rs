//! The desk-scale verification corpus.
//!
//! Two parts:
//! * every graph on at most `small_vertices` vertices (one per isomorphism
//!   class), each with `weight_draws` weight assignments; all stream orders
//!   when it has at most `exhaustive_max_edges` edges, seeded random orders
//!   otherwise;
//! * `random_instances` random `G(n, p)` graphs with `n <= random_max_vertices`,
//!   each streamed in `random_orders` seeded orders.
//!
//! Results are folded into one summary per algorithm setting, in instance
//! order, so the summary does not depend on thread scheduling.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::graph::Edge;
use crate::oracle::DenseGraph;

use super::experiment::{mix_seed, run_instance, Algorithm, ExperimentConfig, OrderPlan, RunReport};
use super::generator::{generate, GeneratorSpec, GraphKind, Instance, WeightDist};
use super::HarnessError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusConfig {
    pub small_vertices: usize,
    pub weight_draws: usize,
    pub exhaustive_max_edges: usize,
    pub small_dense_orders: usize,
    pub random_instances: usize,
    pub random_max_vertices: usize,
    pub random_p: f64,
    pub random_orders: usize,
    pub seed: u64,
    pub oracle_limit: usize,
    pub verify: bool,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig {
            small_vertices: 6,
            weight_draws: 50,
            exhaustive_max_edges: 6,
            small_dense_orders: 10,
            random_instances: 10_000,
            random_max_vertices: 12,
            random_p: 0.5,
            random_orders: 10,
            seed: 0x5EED,
            // K12 has 66 edges; the corpus always runs the oracle
            oracle_limit: 66,
            verify: true,
        }
    }
}

/// Weight distributions cycled through by the corpus.
pub fn corpus_weight_dist(index: usize) -> WeightDist {
    match index % 4 {
        0 => WeightDist::Uniform { lo: 1.0, hi: 100.0 },
        1 => WeightDist::IntegerUniform { lo: 1, hi: 5 },
        2 => WeightDist::PowersOf { q: 2.0, max_exp: 6 },
        _ => WeightDist::PowersOf { q: 1.7, max_exp: 8 },
    }
}

fn pair_list(n: usize) -> Vec<(u64, u64)> {
    (0..n as u64)
        .flat_map(|u| (u + 1..n as u64).map(move |v| (u, v)))
        .collect()
}

/// One edge list per isomorphism class of graphs on `n` vertices (`n <= 7`),
/// as the lexicographically smallest edge bitmask of the class.
pub fn graph_classes(n: usize) -> Vec<Vec<(u64, u64)>> {
    assert!(n <= 7, "brute-force canonical forms are only practical for tiny n");
    let pairs = pair_list(n);
    let index = |a: usize, b: usize| {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        pairs
            .iter()
            .position(|&(u, v)| (u as usize, v as usize) == (a, b))
            .unwrap()
    };
    let perms = super::experiment::permutations(&(0..n).collect::<Vec<_>>());
    // for each permutation, where each edge bit goes
    let maps: Vec<Vec<usize>> = perms
        .iter()
        .map(|p| {
            pairs
                .iter()
                .map(|&(u, v)| index(p[u as usize], p[v as usize]))
                .collect()
        })
        .collect();
    let mut classes = BTreeSet::new();
    for mask in 0u64..(1 << pairs.len()) {
        let canonical = maps
            .iter()
            .map(|map| {
                map.iter()
                    .enumerate()
                    .filter(|(bit, _)| mask >> bit & 1 == 1)
                    .fold(0u64, |acc, (_, &to)| acc | 1 << to)
            })
            .min()
            .unwrap();
        classes.insert(canonical);
    }
    classes
        .into_iter()
        .map(|mask| {
            pairs
                .iter()
                .enumerate()
                .filter(|(bit, _)| mask >> bit & 1 == 1)
                .map(|(_, &p)| p)
                .collect()
        })
        .collect()
}

/// One corpus item: an instance and the orders to stream it in.
#[derive(Clone, Debug)]
pub struct CorpusItem {
    pub instance: Instance,
    pub orders: OrderPlan,
}

fn small_item(
    config: &CorpusConfig,
    class: usize,
    edges: &[(u64, u64)],
    draw: usize,
) -> Result<CorpusItem, HarnessError> {
    let seed = mix_seed(config.seed, (class * 1_000 + draw) as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = corpus_weight_dist(draw);
    let weights: Vec<f64> = match dist {
        WeightDist::Uniform { lo, hi } => edges.iter().map(|_| rng.gen_range(lo..hi)).collect(),
        WeightDist::IntegerUniform { lo, hi } => edges.iter().map(|_| rng.gen_range(lo..=hi) as f64).collect(),
        WeightDist::PowersOf { q, max_exp } => edges
            .iter()
            .map(|_| q.powi(rng.gen_range(0..=max_exp) as i32))
            .collect(),
        WeightDist::Explicit(ws) => ws,
    };
    let order: Vec<Edge<f64>> = edges
        .iter()
        .zip(weights)
        .map(|(&(u, v), w)| Edge::new(u, v, w).expect("generated edge is valid"))
        .collect();
    let vertices = (0..config.small_vertices as u64).map(crate::graph::VertexId);
    let graph = DenseGraph::with_vertices(vertices, order.clone())?;
    let orders = if order.len() <= config.exhaustive_max_edges {
        OrderPlan::Exhaustive
    } else {
        OrderPlan::Random {
            count: config.small_dense_orders,
            seed,
        }
    };
    Ok(CorpusItem {
        instance: Instance::new(format!("small-c{class}-d{draw}"), graph, order),
        orders,
    })
}

fn random_item(config: &CorpusConfig, i: usize) -> Result<CorpusItem, HarnessError> {
    let seed = mix_seed(config.seed ^ 0xB0B, i as u64);
    let n = 2 + (seed % (config.random_max_vertices as u64 - 1)) as usize;
    let spec = GeneratorSpec::new(GraphKind::Gnp { p: config.random_p }, n, corpus_weight_dist(i), seed);
    let mut instance = generate(&spec)?;
    instance.id = format!("random-{i}-n{n}");
    Ok(CorpusItem {
        instance,
        orders: OrderPlan::Random {
            count: config.random_orders,
            seed,
        },
    })
}

/// Running totals for one algorithm setting.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmSummary {
    pub algorithm: String,
    pub k_or_gamma: f64,
    pub runs: u64,
    pub ratio_runs: u64,
    pub oracle_skipped: u64,
    pub worst_ratio: f64,
    pub worst_run: Option<(String, u64)>,
    pub ratio_sum: f64,
    pub insertions: u64,
    pub verifier_passes: u64,
    pub verifier_failures: u64,
    pub invalid_outputs: u64,
    pub memory_violations: u64,
    pub work_violations: u64,
    pub max_candidates: usize,
    pub max_touched: usize,
    pub monotonicity_failures: u64,
    pub maximality_failures: u64,
    pub invariant_failures: u64,
}

impl AlgorithmSummary {
    pub fn new(algorithm: &Algorithm) -> Self {
        AlgorithmSummary {
            algorithm: algorithm.name().to_string(),
            k_or_gamma: algorithm.param(),
            runs: 0,
            ratio_runs: 0,
            oracle_skipped: 0,
            worst_ratio: 1.0,
            worst_run: None,
            ratio_sum: 0.0,
            insertions: 0,
            verifier_passes: 0,
            verifier_failures: 0,
            invalid_outputs: 0,
            memory_violations: 0,
            work_violations: 0,
            max_candidates: 0,
            max_touched: 0,
            monotonicity_failures: 0,
            maximality_failures: 0,
            invariant_failures: 0,
        }
    }

    pub fn mean_ratio(&self) -> f64 {
        if self.ratio_runs == 0 {
            1.0
        } else {
            self.ratio_sum / self.ratio_runs as f64
        }
    }

    pub fn absorb(&mut self, r: &RunReport) {
        self.runs += 1;
        self.oracle_skipped += u64::from(r.oracle_skipped);
        if let Some(x) = r.ratio {
            self.ratio_runs += 1;
            self.ratio_sum += x;
            if x > self.worst_ratio || self.worst_run.is_none() {
                self.worst_ratio = self.worst_ratio.max(x);
                self.worst_run = Some((r.instance_id.clone(), r.order_seed));
            }
        }
        self.insertions += r.insertions;
        self.verifier_passes += r.verifier_passes;
        self.verifier_failures += r.verifier_failures;
        self.invalid_outputs += u64::from(!r.valid_output);
        self.memory_violations += u64::from(!r.memory_ok());
        self.work_violations += u64::from(!r.work_ok());
        self.max_candidates = self.max_candidates.max(r.max_candidates);
        self.max_touched = self.max_touched.max(r.max_touched);
        self.monotonicity_failures += r.monotonicity_failures;
        self.maximality_failures += r.maximality_failures;
        self.invariant_failures += r.invariant_failures;
    }

    fn merge(&mut self, other: &AlgorithmSummary) {
        self.runs += other.runs;
        self.ratio_runs += other.ratio_runs;
        self.oracle_skipped += other.oracle_skipped;
        if other.worst_run.is_some() && (self.worst_run.is_none() || other.worst_ratio > self.worst_ratio) {
            self.worst_ratio = other.worst_ratio;
            self.worst_run = other.worst_run.clone();
        }
        self.ratio_sum += other.ratio_sum;
        self.insertions += other.insertions;
        self.verifier_passes += other.verifier_passes;
        self.verifier_failures += other.verifier_failures;
        self.invalid_outputs += other.invalid_outputs;
        self.memory_violations += other.memory_violations;
        self.work_violations += other.work_violations;
        self.max_candidates = self.max_candidates.max(other.max_candidates);
        self.max_touched = self.max_touched.max(other.max_touched);
        self.monotonicity_failures += other.monotonicity_failures;
        self.maximality_failures += other.maximality_failures;
        self.invariant_failures += other.invariant_failures;
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusSummary {
    pub small_instances: usize,
    pub random_instances: usize,
    pub algorithms: Vec<AlgorithmSummary>,
}

impl CorpusSummary {
    pub fn get(&self, algorithm: &str, param: f64) -> Option<&AlgorithmSummary> {
        self.algorithms
            .iter()
            .find(|a| a.algorithm == algorithm && a.k_or_gamma.to_bits() == param.to_bits())
    }
}

fn summarize_item(
    item: &CorpusItem,
    config: &CorpusConfig,
    algorithms: &[Algorithm],
) -> Result<Vec<AlgorithmSummary>, HarnessError> {
    let exp = ExperimentConfig {
        algorithms: algorithms.to_vec(),
        orders: item.orders,
        oracle_limit: Some(config.oracle_limit),
        verify: config.verify,
    };
    let mut sums: Vec<AlgorithmSummary> = algorithms.iter().map(AlgorithmSummary::new).collect();
    for (i, r) in run_instance(&item.instance, &exp)?.iter().enumerate() {
        sums[i % algorithms.len()].absorb(r);
    }
    Ok(sums)
}

/// Runs every algorithm over the whole corpus.
pub fn run_corpus(config: &CorpusConfig, algorithms: &[Algorithm]) -> Result<CorpusSummary, HarnessError> {
    let classes = graph_classes(config.small_vertices);
    let small_jobs: Vec<(usize, usize)> = (0..classes.len())
        .flat_map(|c| (0..config.weight_draws).map(move |d| (c, d)))
        .collect();

    let small: Vec<Vec<AlgorithmSummary>> = small_jobs
        .par_iter()
        .map(|&(c, d)| summarize_item(&small_item(config, c, &classes[c], d)?, config, algorithms))
        .collect::<Result<_, _>>()?;
    let random: Vec<Vec<AlgorithmSummary>> = (0..config.random_instances)
        .into_par_iter()
        .map(|i| summarize_item(&random_item(config, i)?, config, algorithms))
        .collect::<Result<_, _>>()?;

    let mut totals: Vec<AlgorithmSummary> = algorithms.iter().map(AlgorithmSummary::new).collect();
    for part in small.iter().chain(&random) {
        for (total, s) in totals.iter_mut().zip(part) {
            total.merge(s);
        }
    }
    Ok(CorpusSummary {
        small_instances: small_jobs.len(),
        random_instances: config.random_instances,
        algorithms: totals,
    })
}
