use crate::error::{Error, Result};

/// Users `0..m` partitioned into `c` non-empty, disjoint groups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupedPopulation {
    group_of: Vec<usize>,
    sizes: Vec<usize>,
}

impl GroupedPopulation {
    /// Builds a population from the group index of every user.
    ///
    /// The number of groups is `max(group_of) + 1`; every group in that range
    /// must own at least one user.
    pub fn new(group_of: Vec<usize>) -> Result<Self> {
        if group_of.is_empty() {
            return Err(Error::InvalidPopulation("no users".into()));
        }
        let c = group_of.iter().copied().max().unwrap_or(0) + 1;
        let mut sizes = vec![0usize; c];
        for &g in &group_of {
            sizes[g] += 1;
        }
        if let Some(empty) = sizes.iter().position(|&s| s == 0) {
            return Err(Error::InvalidPopulation(format!("group {empty} is empty")));
        }
        Ok(Self { group_of, sizes })
    }

    /// Contiguous blocks: the first `sizes[0]` users form group 0, and so on.
    pub fn from_sizes(sizes: &[usize]) -> Result<Self> {
        let group_of = sizes
            .iter()
            .enumerate()
            .flat_map(|(g, &s)| std::iter::repeat_n(g, s))
            .collect();
        Self::new(group_of)
    }

    /// Every user in its own group.
    pub fn singletons(m: usize) -> Result<Self> {
        Self::new((0..m).collect())
    }

    /// A single group holding all `m` users.
    pub fn uniform(m: usize) -> Result<Self> {
        Self::new(vec![0; m])
    }

    pub fn num_users(&self) -> usize {
        self.group_of.len()
    }

    pub fn num_groups(&self) -> usize {
        self.sizes.len()
    }

    pub fn group_of(&self, user: usize) -> usize {
        self.group_of[user]
    }

    pub fn groups(&self) -> &[usize] {
        &self.group_of
    }

    pub fn group_size(&self, group: usize) -> usize {
        self.sizes[group]
    }

    pub fn group_sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Users belonging to `group`, in increasing order.
    pub fn members(&self, group: usize) -> impl Iterator<Item = usize> + '_ {
        self.group_of
            .iter()
            .enumerate()
            .filter(move |(_, &g)| g == group)
            .map(|(u, _)| u)
    }

    /// Converts per-group sums of user utilities into the population average.
    pub fn average_of_sums(&self, sums: &[f64]) -> f64 {
        sums.iter().sum::<f64>() / self.num_users() as f64
    }

    /// Converts per-group sums of user utilities into per-group averages.
    pub fn group_averages(&self, sums: &[f64]) -> Vec<f64> {
        sums.iter()
            .zip(&self.sizes)
            .map(|(s, &n)| s / n as f64)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_sum_to_m() {
        let p = GroupedPopulation::new(vec![1, 0, 1, 1, 0]).unwrap();
        assert_eq!(p.num_users(), 5);
        assert_eq!(p.num_groups(), 2);
        assert_eq!(p.group_sizes(), &[2, 3]);
        assert_eq!(p.members(0).collect::<Vec<_>>(), vec![1, 4]);
    }

    #[test]
    fn empty_group_rejected() {
        assert!(GroupedPopulation::new(vec![0, 2, 2]).is_err());
        assert!(GroupedPopulation::new(vec![]).is_err());
        assert!(GroupedPopulation::from_sizes(&[3, 0, 1]).is_err());
    }

    #[test]
    fn from_sizes_is_contiguous() {
        let p = GroupedPopulation::from_sizes(&[2, 1]).unwrap();
        assert_eq!(p.groups(), &[0, 0, 1]);
    }
}
