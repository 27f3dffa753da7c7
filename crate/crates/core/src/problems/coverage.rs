use crate::error::{Error, Result};
use crate::oracle::GroupUtilityOracle;
use crate::population::GroupedPopulation;

use super::graph::Digraph;

/// Items cover elements; each covered element adds `unit` to its group's
/// utility sum. Shared by set coverage (elements are users) and RR-set
/// coverage (elements are sampled reverse-reachable sets).
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct CoverIndex {
    pub item_elems: Vec<Vec<u32>>,
    pub elem_group: Vec<u32>,
    pub unit: f64,
}

impl CoverIndex {
    pub fn gains_into(&self, covered: &[bool], item: usize, out: &mut [f64]) {
        out.fill(0.0);
        for &e in &self.item_elems[item] {
            let e = e as usize;
            if !covered[e] {
                out[self.elem_group[e] as usize] += 1.0;
            }
        }
        if self.unit != 1.0 {
            for x in out.iter_mut() {
                *x *= self.unit;
            }
        }
    }

    pub fn commit(&self, covered: &mut [bool], item: usize) {
        for &e in &self.item_elems[item] {
            covered[e as usize] = true;
        }
    }
}

/// Maximum-coverage instance: item `v` covers the users `S(v)` and
/// `f_u(S) = 1` iff some item of `S` covers `u`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageInstance {
    population: GroupedPopulation,
    index: CoverIndex,
}

impl CoverageInstance {
    /// User lists are sorted and deduplicated.
    pub fn new(sets: Vec<Vec<usize>>, population: GroupedPopulation) -> Result<Self> {
        let m = population.num_users();
        let mut item_elems = Vec::with_capacity(sets.len());
        for (v, mut users) in sets.into_iter().enumerate() {
            if let Some(&u) = users.iter().find(|&&u| u >= m) {
                return Err(Error::param(format!(
                    "item {v} covers user {u}, but there are only {m} users"
                )));
            }
            users.sort_unstable();
            users.dedup();
            item_elems.push(users.into_iter().map(|u| u as u32).collect());
        }
        let elem_group = population.groups().iter().map(|&g| g as u32).collect();
        Ok(Self {
            population,
            index: CoverIndex {
                item_elems,
                elem_group,
                unit: 1.0,
            },
        })
    }

    /// Users covered by `item`.
    pub fn set(&self, item: usize) -> impl Iterator<Item = usize> + '_ {
        self.index.item_elems[item].iter().map(|&u| u as usize)
    }

    pub fn set_len(&self, item: usize) -> usize {
        self.index.item_elems[item].len()
    }
}

impl GroupUtilityOracle for CoverageInstance {
    type State = Vec<bool>;

    fn num_items(&self) -> usize {
        self.index.item_elems.len()
    }

    fn population(&self) -> &GroupedPopulation {
        &self.population
    }

    fn new_state(&self) -> Vec<bool> {
        vec![false; self.population.num_users()]
    }

    fn group_gains_into(&self, state: &Vec<bool>, item: usize, out: &mut [f64]) {
        self.index.gains_into(state, item, out);
    }

    fn commit(&self, state: &mut Vec<bool>, item: usize) {
        self.index.commit(state, item);
    }
}

/// Dominating-set construction: every node is an item covering itself and
/// its out-neighbors; users are the nodes.
pub fn coverage_from_digraph(
    graph: &Digraph,
    population: GroupedPopulation,
) -> Result<CoverageInstance> {
    if population.num_users() != graph.num_nodes() {
        return Err(Error::InvalidPopulation(format!(
            "population has {} users but the graph has {} nodes",
            population.num_users(),
            graph.num_nodes()
        )));
    }
    let sets = (0..graph.num_nodes())
        .map(|v| {
            let mut s = graph.out_neighbors(v).to_vec();
            s.push(v);
            s
        })
        .collect();
    CoverageInstance::new(sets, population)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::eval_f;

    #[test]
    fn path_sets() {
        let g = Digraph::new(3, vec![(0, 1), (1, 2)]).unwrap();
        let inst = coverage_from_digraph(&g, GroupedPopulation::uniform(3).unwrap()).unwrap();
        let sets: Vec<Vec<usize>> = (0..3).map(|v| inst.set(v).collect()).collect();
        assert_eq!(sets, vec![vec![0, 1], vec![1, 2], vec![2]]);
    }

    #[test]
    fn isolated_node_covers_itself() {
        let g = Digraph::new(2, vec![]).unwrap();
        let inst = coverage_from_digraph(&g, GroupedPopulation::uniform(2).unwrap()).unwrap();
        assert_eq!(inst.set(1).collect::<Vec<_>>(), vec![1]);
        assert!((eval_f(&inst, &[1]).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn population_mismatch() {
        let g = Digraph::new(3, vec![]).unwrap();
        assert!(coverage_from_digraph(&g, GroupedPopulation::uniform(2).unwrap()).is_err());
    }

    #[test]
    fn out_of_range_user() {
        let pop = GroupedPopulation::uniform(2).unwrap();
        assert!(CoverageInstance::new(vec![vec![0, 2]], pop).is_err());
    }
}
