use crate::error::{Error, Result};
use crate::oracle::GroupUtilityOracle;
use crate::population::GroupedPopulation;

/// Benefit kernel applied to the Euclidean user-item distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kernel {
    /// `max{0, dbar - dist}`. `None` uses the largest user-item distance.
    KMedian { dbar: Option<f64> },
    /// `exp(-dist)`.
    Rbf,
}

/// Non-negative `m x n` benefit matrix; `f_u(S) = max_{v in S} b_uv`.
#[derive(Debug, Clone, PartialEq)]
pub struct BenefitMatrix {
    population: GroupedPopulation,
    num_items: usize,
    /// Item-major: column `v` occupies `data[v*m .. (v+1)*m]`.
    data: Vec<f64>,
}

impl BenefitMatrix {
    /// Builds the matrix from `benefit(user, item)`.
    pub fn from_fn(
        population: GroupedPopulation,
        num_items: usize,
        mut benefit: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self> {
        let m = population.num_users();
        let mut data = Vec::with_capacity(m * num_items);
        for v in 0..num_items {
            for u in 0..m {
                let b = benefit(u, v);
                if !(b.is_finite() && b >= 0.0) {
                    return Err(Error::param(format!(
                        "benefit b[{u}][{v}] = {b} must be finite and >= 0"
                    )));
                }
                data.push(b);
            }
        }
        Ok(Self {
            population,
            num_items,
            data,
        })
    }

    /// Row-major rows, one per user.
    pub fn from_rows(population: GroupedPopulation, rows: &[Vec<f64>]) -> Result<Self> {
        if rows.len() != population.num_users() {
            return Err(Error::InvalidPopulation(format!(
                "{} benefit rows for {} users",
                rows.len(),
                population.num_users()
            )));
        }
        let n = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::param("benefit rows have different lengths"));
        }
        Self::from_fn(population, n, |u, v| rows[u][v])
    }

    pub fn num_users(&self) -> usize {
        self.population.num_users()
    }

    pub fn benefit(&self, user: usize, item: usize) -> f64 {
        self.data[item * self.num_users() + user]
    }

    pub fn column(&self, item: usize) -> &[f64] {
        let m = self.num_users();
        &self.data[item * m..(item + 1) * m]
    }
}

impl GroupUtilityOracle for BenefitMatrix {
    /// Current `f_u(S)` for every user.
    type State = Vec<f64>;

    fn num_items(&self) -> usize {
        self.num_items
    }

    fn population(&self) -> &GroupedPopulation {
        &self.population
    }

    fn new_state(&self) -> Vec<f64> {
        vec![0.0; self.num_users()]
    }

    fn group_gains_into(&self, state: &Vec<f64>, item: usize, out: &mut [f64]) {
        out.fill(0.0);
        let groups = self.population.groups();
        for ((&b, &cur), &g) in self.column(item).iter().zip(state).zip(groups) {
            if b > cur {
                out[g] += b - cur;
            }
        }
    }

    fn commit(&self, state: &mut Vec<f64>, item: usize) {
        for (cur, &b) in state.iter_mut().zip(self.column(item)) {
            if b > *cur {
                *cur = b;
            }
        }
    }
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Benefit matrix from user and item coordinates.
pub fn facility_location(
    users: &[Vec<f64>],
    items: &[Vec<f64>],
    kernel: Kernel,
    population: GroupedPopulation,
) -> Result<BenefitMatrix> {
    if users.len() != population.num_users() {
        return Err(Error::InvalidPopulation(format!(
            "{} user points for {} users",
            users.len(),
            population.num_users()
        )));
    }
    let dim = users.first().or(items.first()).map_or(0, Vec::len);
    if let Some(bad) = users.iter().chain(items).find(|p| p.len() != dim) {
        return Err(Error::param(format!(
            "point dimension {} does not match {dim}",
            bad.len()
        )));
    }
    let dist: Vec<f64> = items
        .iter()
        .flat_map(|q| users.iter().map(move |p| distance(p, q)))
        .collect();
    let m = users.len();
    match kernel {
        Kernel::Rbf => BenefitMatrix::from_fn(population, items.len(), |u, v| (-dist[v * m + u]).exp()),
        Kernel::KMedian { dbar } => {
            let dbar = dbar.unwrap_or_else(|| dist.iter().copied().fold(0.0, f64::max));
            if !(dbar.is_finite() && dbar > 0.0) {
                return Err(Error::param(format!("normalization distance {dbar} must be > 0")));
            }
            BenefitMatrix::from_fn(population, items.len(), |u, v| (dbar - dist[v * m + u]).max(0.0))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{eval_f, eval_group, GroupUtilityOracle};

    #[test]
    fn coincident_rbf_is_one() {
        let pop = GroupedPopulation::uniform(1).unwrap();
        let b = facility_location(&[vec![0.3, 0.4]], &[vec![0.3, 0.4]], Kernel::Rbf, pop).unwrap();
        assert_eq!(b.benefit(0, 0), 1.0);
        assert_eq!(eval_f(&b, &[0]).unwrap(), 1.0);
    }

    #[test]
    fn kmedian_truncates_far_pairs() {
        let pop = GroupedPopulation::uniform(2).unwrap();
        let users = [vec![0.0], vec![5.0]];
        let b = facility_location(&users, &[vec![0.0]], Kernel::KMedian { dbar: Some(2.0) }, pop)
            .unwrap();
        assert_eq!(b.benefit(0, 0), 2.0);
        assert_eq!(b.benefit(1, 0), 0.0);
    }

    #[test]
    fn kmedian_default_dbar_is_max_distance() {
        let pop = GroupedPopulation::uniform(2).unwrap();
        let users = [vec![0.0], vec![3.0]];
        let b = facility_location(&users, &[vec![1.0]], Kernel::KMedian { dbar: None }, pop).unwrap();
        assert_eq!(b.benefit(0, 0), 1.0);
        assert_eq!(b.benefit(1, 0), 0.0);
    }

    #[test]
    fn rbf_group_sums_1d() {
        let pop = GroupedPopulation::singletons(2).unwrap();
        let b = facility_location(&[vec![0.0], vec![1.0]], &[vec![0.0]], Kernel::Rbf, pop).unwrap();
        let gains = b.group_gains(&b.new_state(), 0);
        assert_eq!(gains[0], 1.0);
        assert!((gains[1] - (-1.0f64).exp()).abs() < 1e-15);
        assert!((eval_group(&b, &[0]).unwrap()[1] - 0.36787944117144233).abs() < 1e-15);
    }

    #[test]
    fn errors() {
        let pop = GroupedPopulation::uniform(1).unwrap();
        assert!(facility_location(&[vec![0.0]], &[vec![0.0, 1.0]], Kernel::Rbf, pop.clone()).is_err());
        assert!(facility_location(&[vec![0.0]], &[vec![1.0]], Kernel::KMedian { dbar: Some(0.0) }, pop.clone()).is_err());
        assert!(BenefitMatrix::from_rows(pop, &[vec![-1.0]]).is_err());
    }
}
