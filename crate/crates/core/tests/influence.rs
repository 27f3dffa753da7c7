mod common;

use bsm_core::exact::live_edge_spread;
use bsm_core::problems::{build_rr_oracle, coverage_from_digraph, mc_estimate, Digraph, RrSetOracle};
use bsm_core::rng::stream;
use bsm_core::{eval_group, GroupUtilityOracle, GroupedPopulation};
use common::*;
use rand::Rng;

fn path() -> Digraph {
    Digraph::new(3, vec![(0, 1), (1, 2)]).unwrap()
}

/// Standard errors of the RR estimates of `f` and each `f_i`.
fn rr_std_errs(oracle: &RrSetOracle, groups: &[f64]) -> (f64, Vec<f64>) {
    let pop = oracle.population();
    let r = oracle.num_samples() as f64;
    let m = pop.num_users() as f64;
    let per_group: Vec<f64> = groups
        .iter()
        .enumerate()
        .map(|(i, &fi)| {
            let scale = m / pop.group_size(i) as f64;
            let q = fi / scale;
            scale * (q * (1.0 - q) / r).sqrt()
        })
        .collect();
    let f = weighted_mean(groups, pop);
    (((f * (1.0 - f)) / r).sqrt(), per_group)
}

#[test]
fn path_spread_examples() {
    let pop = GroupedPopulation::uniform(3).unwrap();
    let (f, _) = live_edge_spread(&path(), 0.5, &[0], &pop).unwrap();
    assert!((f - 1.75 / 3.0).abs() < 1e-12);

    let rr = build_rr_oracle(&path(), 0.5, 200_000, pop.clone(), 7).unwrap();
    assert!((bsm_core::eval_f(&rr, &[0]).unwrap() - f).abs() <= 0.01);

    let mc = mc_estimate(&path(), 0.5, &[0], 10_000, &pop, 7).unwrap();
    assert!((mc.f - f).abs() <= 0.02);

    let certain = mc_estimate(&path(), 1.0, &[0], 100, &pop, 1).unwrap();
    assert_eq!(certain.f, 1.0);
    let none = mc_estimate(&path(), 0.0, &[0, 2], 100, &pop, 1).unwrap();
    assert_eq!(none.f, 2.0 / 3.0);
}

#[test]
fn zero_probability_rr_is_identity_coverage() {
    let pop = GroupedPopulation::from_sizes(&[2, 2]).unwrap();
    let g = Digraph::new(4, vec![(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
    let rr = build_rr_oracle(&g, 0.0, 50_000, pop, 3).unwrap();
    let groups = eval_group(&rr, &[0]).unwrap();
    assert_eq!(groups[1], 0.0);
    assert!((groups[0] - 0.5).abs() < 0.02);
}

#[test]
fn estimators_agree_with_live_edge_enumeration() {
    for seed in 0..12u64 {
        let mut rng = stream(seed, 31);
        let n = rng.random_range(3..=6);
        let target = rng.random_range(1..=12usize).min(n * (n - 1));
        let mut edges = Vec::new();
        while edges.len() < target {
            let (a, b) = (rng.random_range(0..n), rng.random_range(0..n));
            if a != b && !edges.contains(&(a, b)) {
                edges.push((a, b));
            }
        }
        let g = Digraph::new(n, edges).unwrap();
        let pop = GroupedPopulation::from_sizes(&[n / 2, n - n / 2]).unwrap();
        let p = rng.random_range(0.1..0.9);
        let seeds = vec![rng.random_range(0..n)];
        let (f, groups) = live_edge_spread(&g, p, &seeds, &pop).unwrap();

        let mc = mc_estimate(&g, p, &seeds, 20_000, &pop, seed).unwrap();
        assert!((mc.f - f).abs() <= 3.0 * mc.f_std_err + 1e-12, "seed {seed}: mc {} vs {f}", mc.f);
        for i in 0..2 {
            let tol = 3.0 * mc.group_std_errs[i] + 1e-12;
            assert!((mc.group_values[i] - groups[i]).abs() <= tol, "seed {seed} group {i}");
        }

        let rr = build_rr_oracle(&g, p, 20_000, pop.clone(), seed).unwrap();
        let est = eval_group(&rr, &seeds).unwrap();
        let (se_f, se_groups) = rr_std_errs(&rr, &groups);
        let f_rr = weighted_mean(&est, &pop);
        assert!((f_rr - f).abs() <= 3.0 * se_f + 1e-12, "seed {seed}: rr {f_rr} vs {f}");
        for i in 0..2 {
            assert!((est[i] - groups[i]).abs() <= 3.0 * se_groups[i] + 1e-12, "seed {seed} group {i}");
        }
    }
}

#[test]
fn estimates_do_not_depend_on_worker_count() {
    let pop = GroupedPopulation::from_sizes(&[3, 3]).unwrap();
    let g = Digraph::undirected(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)]).unwrap();
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let rr = build_rr_oracle(&g, 0.3, 30_000, pop.clone(), 11).unwrap();
            let mc = mc_estimate(&g, 0.3, &[0, 3], 9_000, &pop, 11).unwrap();
            (rr.roots().to_vec(), eval_group(&rr, &[1, 4]).unwrap(), mc)
        })
    };
    assert_eq!(run(1), run(8));
}

#[test]
fn dominating_set_coverage() {
    let pop = GroupedPopulation::uniform(3).unwrap();
    let cov = coverage_from_digraph(&path(), pop.clone()).unwrap();
    assert_eq!(cov.set(0).collect::<Vec<_>>(), vec![0, 1]);
    assert_eq!(cov.set(1).collect::<Vec<_>>(), vec![1, 2]);
    assert_eq!(cov.set(2).collect::<Vec<_>>(), vec![2]);
    assert!(coverage_from_digraph(&path(), GroupedPopulation::uniform(4).unwrap()).is_err());

    for seed in 0..5u64 {
        let mut rng = stream(seed, 41);
        let n = 20;
        let mut edges = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if a != b && rng.random_bool(0.15) {
                    edges.push((a, b));
                }
            }
        }
        let e = edges.len();
        let g = Digraph::new(n, edges).unwrap();
        let cov = coverage_from_digraph(&g, GroupedPopulation::uniform(n).unwrap()).unwrap();
        let total: usize = (0..n).map(|v| cov.set_len(v)).sum();
        assert_eq!(total, e + n);
        assert_eq!(cov.num_items(), n);
    }
}
