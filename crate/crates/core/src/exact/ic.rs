use crate::error::{Error, Result};
use crate::population::GroupedPopulation;
use crate::problems::Digraph;

/// Largest edge count accepted by [`live_edge_spread`].
pub const MAX_LIVE_EDGE_EDGES: usize = 24;

/// Exact expected `f` and group averages of a seed set under the IC model,
/// summing over all `2^|E|` live-edge worlds.
pub fn live_edge_spread(
    graph: &Digraph,
    p: f64,
    seeds: &[usize],
    population: &GroupedPopulation,
) -> Result<(f64, Vec<f64>)> {
    let n = graph.num_nodes();
    let edges = graph.edges();
    if edges.len() > MAX_LIVE_EDGE_EDGES {
        return Err(Error::InstanceTooLarge(format!(
            "{} edges; live-edge enumeration supports at most {MAX_LIVE_EDGE_EDGES}",
            edges.len()
        )));
    }
    if population.num_users() != n {
        return Err(Error::InvalidPopulation(format!(
            "population has {} users but the graph has {n} nodes",
            population.num_users()
        )));
    }
    if let Some(&s) = seeds.iter().find(|&&s| s >= n) {
        return Err(Error::ItemOutOfRange { item: s, n });
    }
    let c = population.num_groups();
    let mut expected = vec![0.0; c];
    let mut reached = vec![false; n];
    let mut stack = Vec::new();
    for mask in 0u32..(1u32 << edges.len()) {
        let live = mask.count_ones() as i32;
        let weight = p.powi(live) * (1.0 - p).powi(edges.len() as i32 - live);
        if weight == 0.0 {
            continue;
        }
        reached.fill(false);
        stack.clear();
        for &s in seeds {
            if !reached[s] {
                reached[s] = true;
                stack.push(s);
            }
        }
        while let Some(v) = stack.pop() {
            for (e, &(a, b)) in edges.iter().enumerate() {
                if a == v && mask & (1 << e) != 0 && !reached[b] {
                    reached[b] = true;
                    stack.push(b);
                }
            }
        }
        for (u, _) in reached.iter().enumerate().filter(|(_, &r)| r) {
            expected[population.group_of(u)] += weight;
        }
    }
    let f = expected.iter().sum::<f64>() / n as f64;
    let groups = population.group_averages(&expected);
    Ok((f, groups))
}
