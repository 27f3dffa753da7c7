use crate::error::{Error, Result};

/// Directed graph on nodes `0..n` stored as an edge list plus CSR adjacency
/// in both directions.
#[derive(Debug, Clone, PartialEq)]
pub struct Digraph {
    num_nodes: usize,
    edges: Vec<(usize, usize)>,
    /// Uniform propagation probability, if one is attached to the graph.
    probability: Option<f64>,
    out_offsets: Vec<usize>,
    out_targets: Vec<usize>,
    in_offsets: Vec<usize>,
    in_sources: Vec<usize>,
}

fn csr(n: usize, pairs: impl Iterator<Item = (usize, usize)> + Clone) -> (Vec<usize>, Vec<usize>) {
    let mut offsets = vec![0usize; n + 1];
    for (a, _) in pairs.clone() {
        offsets[a + 1] += 1;
    }
    for i in 0..n {
        offsets[i + 1] += offsets[i];
    }
    let mut fill = offsets.clone();
    let mut targets = vec![0usize; offsets[n]];
    for (a, b) in pairs {
        targets[fill[a]] = b;
        fill[a] += 1;
    }
    (offsets, targets)
}

impl Digraph {
    /// Builds a graph; self-loops and parallel edges are kept as given.
    pub fn new(num_nodes: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if let Some(&(a, b)) = edges.iter().find(|&&(a, b)| a >= num_nodes || b >= num_nodes) {
            return Err(Error::param(format!(
                "edge ({a}, {b}) out of range for {num_nodes} nodes"
            )));
        }
        let (out_offsets, out_targets) = csr(num_nodes, edges.iter().copied());
        let (in_offsets, in_sources) = csr(num_nodes, edges.iter().map(|&(a, b)| (b, a)));
        Ok(Self {
            num_nodes,
            edges,
            probability: None,
            out_offsets,
            out_targets,
            in_offsets,
            in_sources,
        })
    }

    /// Stores each undirected pair as two arcs.
    pub fn undirected(num_nodes: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let edges = pairs
            .iter()
            .flat_map(|&(a, b)| [(a, b), (b, a)])
            .collect();
        Self::new(num_nodes, edges)
    }

    pub fn with_probability(mut self, p: f64) -> Result<Self> {
        check_probability(p)?;
        self.probability = Some(p);
        Ok(self)
    }

    pub fn probability(&self) -> Option<f64> {
        self.probability
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn out_neighbors(&self, v: usize) -> &[usize] {
        &self.out_targets[self.out_offsets[v]..self.out_offsets[v + 1]]
    }

    pub fn in_neighbors(&self, v: usize) -> &[usize] {
        &self.in_sources[self.in_offsets[v]..self.in_offsets[v + 1]]
    }
}

pub(crate) fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::param(format!("probability {p} outside [0, 1]")))
    }
}
