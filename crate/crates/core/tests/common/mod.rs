#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use bsm_core::data::{load_groups, load_sets};
use bsm_core::problems::{BenefitMatrix, CoverageInstance};
use bsm_core::rng::stream;
use bsm_core::GroupedPopulation;
use rand::Rng;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

/// The four-item, twelve-user worked example (users u11..u19 then u21..u23).
pub fn example_sets() -> Vec<Vec<usize>> {
    vec![
        vec![0, 1, 2, 3, 4],
        vec![5, 6, 7, 8],
        vec![5, 8, 9],
        vec![10, 11],
    ]
}

pub fn example() -> CoverageInstance {
    let pop = GroupedPopulation::from_sizes(&[9, 3]).unwrap();
    CoverageInstance::new(example_sets(), pop).unwrap()
}

pub fn example_from_files() -> CoverageInstance {
    let sets = load_sets(fixture("example_sets.tsv")).unwrap();
    let groups = load_groups(fixture("example_groups.tsv")).unwrap();
    sets.coverage(&groups).unwrap().0
}

pub fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9
}

/// Per-group averages of a set system by explicit union.
pub fn coverage_groups(sets: &[Vec<usize>], pop: &GroupedPopulation, items: &[usize]) -> Vec<f64> {
    let covered: BTreeSet<usize> = items.iter().flat_map(|&v| sets[v].iter().copied()).collect();
    let mut counts = vec![0usize; pop.num_groups()];
    for u in covered {
        counts[pop.group_of(u)] += 1;
    }
    counts
        .iter()
        .zip(pop.group_sizes())
        .map(|(&c, &m)| c as f64 / m as f64)
        .collect()
}

/// Per-group averages of `max_{v in S} b_uv` by explicit scan.
pub fn facility_groups(rows: &[Vec<f64>], pop: &GroupedPopulation, items: &[usize]) -> Vec<f64> {
    let mut sums = vec![0.0; pop.num_groups()];
    for (u, row) in rows.iter().enumerate() {
        let best = items.iter().map(|&v| row[v]).fold(0.0, f64::max);
        sums[pop.group_of(u)] += best;
    }
    sums.iter()
        .zip(pop.group_sizes())
        .map(|(s, &m)| s / m as f64)
        .collect()
}

pub fn weighted_mean(groups: &[f64], pop: &GroupedPopulation) -> f64 {
    let m = pop.num_users() as f64;
    groups
        .iter()
        .zip(pop.group_sizes())
        .map(|(g, &mi)| g * mi as f64 / m)
        .sum()
}

pub fn min(values: &[f64]) -> f64 {
    values.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Random population of `m` users in `c` non-empty groups.
pub fn random_population(rng: &mut impl Rng, m: usize, c: usize) -> GroupedPopulation {
    let mut group_of: Vec<usize> = (0..m).map(|u| if u < c { u } else { rng.random_range(0..c) }).collect();
    for i in (1..m).rev() {
        group_of.swap(i, rng.random_range(0..=i));
    }
    GroupedPopulation::new(group_of).unwrap()
}

pub struct RandomCoverage {
    pub sets: Vec<Vec<usize>>,
    pub instance: CoverageInstance,
}

pub fn random_coverage(seed: u64, n: usize, m: usize, c: usize, density: f64) -> RandomCoverage {
    let mut rng = stream(seed, 99);
    let pop = random_population(&mut rng, m, c);
    let sets: Vec<Vec<usize>> = (0..n)
        .map(|_| (0..m).filter(|_| rng.random_bool(density)).collect())
        .collect();
    let instance = CoverageInstance::new(sets.clone(), pop).unwrap();
    RandomCoverage { sets, instance }
}

pub struct RandomFacility {
    pub rows: Vec<Vec<f64>>,
    pub matrix: BenefitMatrix,
}

pub fn random_facility(seed: u64, n: usize, m: usize, c: usize) -> RandomFacility {
    let mut rng = stream(seed, 98);
    let pop = random_population(&mut rng, m, c);
    let rows: Vec<Vec<f64>> = (0..m)
        .map(|_| {
            (0..n)
                .map(|_| if rng.random_bool(0.3) { 0.0 } else { rng.random::<f64>() })
                .collect()
        })
        .collect();
    let matrix = BenefitMatrix::from_rows(pop, &rows).unwrap();
    RandomFacility { rows, matrix }
}

/// All size-`k` subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            cur.push(v);
            rec(v + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}
