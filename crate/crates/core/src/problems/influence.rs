//! Independent-cascade influence: reverse-reachable-set estimation and
//! Monte-Carlo evaluation.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::oracle::GroupUtilityOracle;
use crate::population::GroupedPopulation;
use crate::rng;

use super::coverage::CoverIndex;
use super::graph::{check_probability, Digraph};

/// Default number of RR-sets.
pub const DEFAULT_RR_SAMPLES: usize = 100_000;
/// Default number of Monte-Carlo cascades for evaluation.
pub const DEFAULT_MC_REPS: usize = 10_000;
/// Default uniform propagation probability.
pub const DEFAULT_PROBABILITY: f64 = 0.1;

const RR_BLOCK: usize = 4096;
const MC_BLOCK: usize = 1024;

/// Frozen sample of reverse-reachable sets, used as a coverage oracle.
///
/// Roots are uniform over all `m` users. The sum of `f_u` over group `i` is
/// estimated by `(m / R) * #{covered RR-sets rooted in group i}`, so the
/// group average is `(m / (m_i R))` times that count.
#[derive(Debug, Clone, PartialEq)]
pub struct RrSetOracle {
    population: GroupedPopulation,
    index: CoverIndex,
    roots: Vec<u32>,
    samples: usize,
    seed: u64,
}

impl RrSetOracle {
    pub fn num_samples(&self) -> usize {
        self.samples
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn roots(&self) -> &[u32] {
        &self.roots
    }

    /// Number of sampled RR-sets rooted in each group.
    pub fn roots_per_group(&self) -> Vec<usize> {
        let mut counts = vec![0; self.population.num_groups()];
        for &r in &self.roots {
            counts[self.population.group_of(r as usize)] += 1;
        }
        counts
    }
}

impl GroupUtilityOracle for RrSetOracle {
    type State = Vec<bool>;

    fn num_items(&self) -> usize {
        self.index.item_elems.len()
    }

    fn population(&self) -> &GroupedPopulation {
        &self.population
    }

    fn new_state(&self) -> Vec<bool> {
        vec![false; self.samples]
    }

    fn group_gains_into(&self, state: &Vec<bool>, item: usize, out: &mut [f64]) {
        self.index.gains_into(state, item, out);
    }

    fn commit(&self, state: &mut Vec<bool>, item: usize) {
        self.index.commit(state, item);
    }
}

fn check_graph(graph: &Digraph, population: &GroupedPopulation, p: f64) -> Result<()> {
    if graph.num_nodes() == 0 {
        return Err(Error::param("empty graph"));
    }
    if population.num_users() != graph.num_nodes() {
        return Err(Error::InvalidPopulation(format!(
            "population has {} users but the graph has {} nodes",
            population.num_users(),
            graph.num_nodes()
        )));
    }
    check_probability(p)
}

/// Samples `samples` RR-sets under the IC model with uniform edge
/// probability `p`. Sample block `b` uses random stream `b` of `seed`.
pub fn build_rr_oracle(
    graph: &Digraph,
    p: f64,
    samples: usize,
    population: GroupedPopulation,
    seed: u64,
) -> Result<RrSetOracle> {
    check_graph(graph, &population, p)?;
    if samples == 0 {
        return Err(Error::param("RR sample count must be >= 1"));
    }
    let n = graph.num_nodes();
    let blocks = samples.div_ceil(RR_BLOCK);
    let sampled: Vec<(Vec<u32>, Vec<Vec<u32>>)> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let count = RR_BLOCK.min(samples - b * RR_BLOCK);
            let mut rng = rng::stream(seed, b as u64);
            let mut mark = vec![usize::MAX; n];
            let mut roots = Vec::with_capacity(count);
            let mut sets = Vec::with_capacity(count);
            for j in 0..count {
                let root = rng.random_range(0..n);
                roots.push(root as u32);
                mark[root] = j;
                let mut set = vec![root as u32];
                let mut head = 0;
                while head < set.len() {
                    let v = set[head] as usize;
                    head += 1;
                    for &u in graph.in_neighbors(v) {
                        if mark[u] != j && rng.random_bool(p) {
                            mark[u] = j;
                            set.push(u as u32);
                        }
                    }
                }
                sets.push(set);
            }
            (roots, sets)
        })
        .collect();

    let mut roots = Vec::with_capacity(samples);
    let mut item_elems: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut id = 0u32;
    for (block_roots, block_sets) in sampled {
        roots.extend(block_roots);
        for set in block_sets {
            for &v in &set {
                item_elems[v as usize].push(id);
            }
            id += 1;
        }
    }
    let elem_group: Vec<u32> = roots
        .iter()
        .map(|&r| population.group_of(r as usize) as u32)
        .collect();

    let oracle = RrSetOracle {
        index: CoverIndex {
            item_elems,
            elem_group,
            unit: n as f64 / samples as f64,
        },
        roots,
        samples,
        seed,
        population,
    };
    if let Some(empty) = oracle.roots_per_group().iter().position(|&c| c == 0) {
        return Err(Error::param(format!(
            "no RR-set rooted in group {empty}; increase the sample count"
        )));
    }
    Ok(oracle)
}

/// Monte-Carlo estimate of `f` and the group averages for a seed set.
#[derive(Debug, Clone, PartialEq)]
pub struct SpreadEstimate {
    pub f: f64,
    pub group_values: Vec<f64>,
    /// Standard error of `f`.
    pub f_std_err: f64,
    /// Standard error of each group average.
    pub group_std_errs: Vec<f64>,
}

impl SpreadEstimate {
    pub fn g(&self) -> f64 {
        crate::oracle::min_of(&self.group_values)
    }
}

/// Simulates `reps` independent cascades from `seeds`; cascade block `b`
/// uses random stream `b` of `seed`.
pub fn mc_estimate(
    graph: &Digraph,
    p: f64,
    seeds: &[usize],
    reps: usize,
    population: &GroupedPopulation,
    seed: u64,
) -> Result<SpreadEstimate> {
    check_graph(graph, population, p)?;
    if reps == 0 {
        return Err(Error::param("replication count must be >= 1"));
    }
    let n = graph.num_nodes();
    if let Some(&s) = seeds.iter().find(|&&s| s >= n) {
        return Err(Error::ItemOutOfRange { item: s, n });
    }
    let c = population.num_groups();
    let blocks = reps.div_ceil(MC_BLOCK);

    // Per block: reached count per group and sum of squared per-group reach.
    let partial: Vec<(Vec<u64>, Vec<u64>, u64)> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let count = MC_BLOCK.min(reps - b * MC_BLOCK);
            let mut rng = rng::stream(seed, b as u64);
            let mut mark = vec![usize::MAX; n];
            let mut reached = vec![0u64; c];
            let mut reached_sq = vec![0u64; c];
            let mut total_sq = 0u64;
            let mut frontier = Vec::new();
            let mut per_group = vec![0u64; c];
            for r in 0..count {
                frontier.clear();
                per_group.fill(0);
                for &s in seeds {
                    if mark[s] != r {
                        mark[s] = r;
                        frontier.push(s);
                    }
                }
                let mut head = 0;
                while head < frontier.len() {
                    let v = frontier[head];
                    head += 1;
                    for &u in graph.out_neighbors(v) {
                        if mark[u] != r && rng.random_bool(p) {
                            mark[u] = r;
                            frontier.push(u);
                        }
                    }
                }
                for &v in &frontier {
                    per_group[population.group_of(v)] += 1;
                }
                let total: u64 = per_group.iter().sum();
                total_sq += total * total;
                for i in 0..c {
                    reached[i] += per_group[i];
                    reached_sq[i] += per_group[i] * per_group[i];
                }
            }
            (reached, reached_sq, total_sq)
        })
        .collect();

    let mut reached = vec![0u64; c];
    let mut reached_sq = vec![0u64; c];
    let mut total_sq = 0u64;
    for (r, rs, ts) in partial {
        for i in 0..c {
            reached[i] += r[i];
            reached_sq[i] += rs[i];
        }
        total_sq += ts;
    }

    let reps_f = reps as f64;
    let std_err = |sum: f64, sum_sq: f64, scale: f64| {
        let mean = sum / reps_f;
        let var = (sum_sq / reps_f - mean * mean).max(0.0);
        (var / reps_f).sqrt() / scale
    };
    let total: u64 = reached.iter().sum();
    let m = n as f64;
    let group_values = (0..c)
        .map(|i| reached[i] as f64 / (reps_f * population.group_size(i) as f64))
        .collect();
    let group_std_errs = (0..c)
        .map(|i| {
            std_err(
                reached[i] as f64,
                reached_sq[i] as f64,
                population.group_size(i) as f64,
            )
        })
        .collect();
    Ok(SpreadEstimate {
        f: total as f64 / (reps_f * m),
        group_values,
        f_std_err: std_err(total as f64, total_sq as f64, m),
        group_std_errs,
    })
}
