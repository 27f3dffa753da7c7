mod common;

use bsm_core::algorithms::{greedy_max, saturate_rsm, DEFAULT_BISECTION_TOL};
use bsm_core::composite::{CompositeObjective, TruncatedComposite};
use bsm_core::exact::{
    binomial, brute_force, export_ilp_fl, export_ilp_mc, parse_lp, IlpMode, LpModel,
};
use bsm_core::problems::{BenefitMatrix, CoverageInstance};
use bsm_core::rng::stream;
use bsm_core::{eval_f, eval_g, Error, GroupUtilityOracle, GroupedPopulation};
use common::*;
use rand::Rng;

#[test]
fn enumeration_matches_an_independent_scan() {
    for seed in 0..30u64 {
        let mut rng = stream(seed, 21);
        let n = rng.random_range(4..=12);
        let k = rng.random_range(1..=3);
        let x = random_coverage(seed, n, 20, 2, 0.2);
        let pop = x.instance.population();
        let all = subsets(n, k);
        let scan: Vec<(f64, f64)> = all
            .iter()
            .map(|s| {
                let groups = coverage_groups(&x.sets, pop, s);
                (weighted_mean(&groups, pop), min(&groups))
            })
            .collect();
        let opt_f = scan.iter().map(|p| p.0).fold(0.0, f64::max);
        let opt_g = scan.iter().map(|p| p.1).fold(0.0, f64::max);
        let r = brute_force(&x.instance, k, 0.7).unwrap();
        assert!((r.opt_f - opt_f).abs() < 1e-12);
        assert!((r.opt_g - opt_g).abs() < 1e-12);
        let first_f = all.iter().zip(&scan).find(|(_, p)| p.0 >= opt_f - 1e-12).unwrap().0;
        assert_eq!(&r.opt_f_witness, first_f);
        let bsm_f = scan
            .iter()
            .filter(|p| p.1 >= 0.7 * opt_g - 1e-12)
            .map(|p| p.0)
            .fold(0.0, f64::max);
        assert!((r.bsm.f - bsm_f).abs() < 1e-12);
        assert!(r.bsm.g >= 0.7 * r.opt_g - 1e-12);
        assert_eq!(r.bsm.items.len(), k);

        let greedy = greedy_max(&CompositeObjective::new(&x.instance, TruncatedComposite::average()), k)
            .unwrap()
            .value();
        assert!(r.opt_f + 1e-12 >= greedy);
        assert!(greedy >= (1.0 - (-1.0f64).exp()) * r.opt_f - 1e-12);
        let sat = saturate_rsm(&x.instance, k, DEFAULT_BISECTION_TOL).unwrap();
        assert!(r.opt_g + 1e-12 >= sat.opt_g);
    }
}

#[test]
fn constrained_optimum_is_monotone_in_tau() {
    for seed in 0..10u64 {
        let x = random_facility(seed, 9, 15, 3);
        let mut prev = f64::INFINITY;
        for step in 0..=10 {
            let tau = step as f64 / 10.0;
            let r = brute_force(&x.matrix, 3, tau).unwrap();
            if step == 0 {
                assert_eq!(r.bsm.f, r.opt_f);
            }
            assert!(r.bsm.f <= prev + 1e-12);
            prev = r.bsm.f;
        }
    }
}

#[test]
fn enumeration_guard() {
    assert_eq!(binomial(30, 10), 30_045_015);
    let x = random_coverage(1, 30, 10, 2, 0.3);
    match brute_force(&x.instance, 10, 0.5) {
        Err(Error::InstanceTooLarge(msg)) => assert!(msg.contains("30045015")),
        other => panic!("expected guard error, got {other:?}"),
    }
    let small = example();
    let r = brute_force(&small, 4, 1.0).unwrap();
    assert_eq!(r.opt_f_witness, vec![0, 1, 2, 3]);
    assert!(brute_force(&small, 5, 0.5).is_err());
}

fn coefficient(model: &LpModel, row: &str, var: &str) -> Option<f64> {
    let terms = if row == "obj" { &model.objective } else { &model.row(row).unwrap().terms };
    terms.iter().find(|(v, _)| v == var).map(|(_, c)| *c)
}

fn count_vars(model: &LpModel, prefix: char) -> usize {
    model
        .variables()
        .iter()
        .filter(|v| v.starts_with(prefix))
        .count()
}

#[test]
fn coverage_lp_round_trip() {
    let x = example();
    let text = export_ilp_mc(&x, 2, 0.0, None, IlpMode::Utility).unwrap();
    assert_eq!(text, export_ilp_mc(&x, 2, 0.0, None, IlpMode::Utility).unwrap());
    let model = parse_lp(&text).unwrap();
    assert!(model.maximize);
    assert_eq!(count_vars(&model, 'x'), 4);
    assert_eq!(count_vars(&model, 'y'), 12);
    assert_eq!(model.binaries.len(), 16);
    assert_eq!(model.rows.len(), 13);
    assert_eq!(model.rows.iter().filter(|r| r.name.starts_with("cover_")).count(), 12);
    let card = model.row("card").unwrap();
    assert_eq!((card.op.as_str(), card.rhs, card.terms.len()), ("<=", 2.0, 4));
    assert_eq!(model.objective.len(), 12);
    assert!(model.objective.iter().all(|(_, c)| (c - 1.0 / 12.0).abs() < 1e-12));
    // u16 (index 5) is covered by v2 and v3.
    let row = model.row("cover_5").unwrap();
    assert_eq!(coefficient(&model, "cover_5", "x1"), Some(1.0));
    assert_eq!(coefficient(&model, "cover_5", "x2"), Some(1.0));
    assert_eq!(coefficient(&model, "cover_5", "y5"), Some(-1.0));
    assert_eq!((row.op.as_str(), row.rhs, row.terms.len()), (">=", 0.0, 3));

    let robust = parse_lp(&export_ilp_mc(&x, 2, 0.0, None, IlpMode::Robust).unwrap()).unwrap();
    assert_eq!(robust.objective, vec![("w".to_string(), 1.0)]);
    assert_eq!(robust.bounds, vec!["w >= 0"]);
    assert!(!robust.binaries.contains(&"w".to_string()));
    assert!((coefficient(&robust, "group_0", "y0").unwrap() - 1.0 / 9.0).abs() < 1e-12);
    assert!((coefficient(&robust, "group_1", "y11").unwrap() - 1.0 / 3.0).abs() < 1e-12);
    assert_eq!(coefficient(&robust, "group_1", "w"), Some(-1.0));
    assert_eq!(robust.rows.len(), 15);

    let bsm = parse_lp(&export_ilp_mc(&x, 2, 0.5, Some(5.0 / 9.0), IlpMode::Bsm).unwrap()).unwrap();
    let fair = bsm.row("fair_0").unwrap();
    assert!((fair.rhs - 0.5 * 5.0 / 9.0).abs() < 1e-12);
    assert_eq!(fair.terms.len(), 9);
    assert!(export_ilp_mc(&x, 2, 0.5, None, IlpMode::Bsm).is_err());
    let empty = CoverageInstance::new(vec![], GroupedPopulation::uniform(3).unwrap()).unwrap();
    assert!(export_ilp_mc(&empty, 1, 0.0, None, IlpMode::Utility).is_err());
}

#[test]
fn random_coverage_lp_matches_instance() {
    for seed in 0..5u64 {
        let x = random_coverage(seed, 12, 20, 3, 0.3);
        let pop = x.instance.population();
        let model = parse_lp(&export_ilp_mc(&x.instance, 3, 0.6, Some(0.4), IlpMode::Bsm).unwrap()).unwrap();
        for j in 0..20 {
            let row = model.row(&format!("cover_{j}")).unwrap();
            let mut expect: Vec<String> = (0..12)
                .filter(|&l| x.sets[l].contains(&j))
                .map(|l| format!("x{l}"))
                .collect();
            expect.push(format!("y{j}"));
            let got: Vec<String> = row.terms.iter().map(|(v, _)| v.clone()).collect();
            assert_eq!(got, expect);
        }
        for i in 0..3 {
            let row = model.row(&format!("fair_{i}")).unwrap();
            assert_eq!(row.terms.len(), pop.group_size(i));
            let w = 1.0 / pop.group_size(i) as f64;
            assert!(row.terms.iter().all(|(_, c)| (c - w).abs() < 1e-12));
            assert!((row.rhs - 0.24).abs() < 1e-12);
        }
    }
}

#[test]
fn facility_lp_round_trip() {
    let pop = GroupedPopulation::singletons(2).unwrap();
    let rows = vec![vec![0.3, 1.0 / 7.0], vec![0.0, 0.9]];
    let b = BenefitMatrix::from_rows(pop, &rows).unwrap();
    let model = parse_lp(&export_ilp_fl(&b, 1, 0.0, None, IlpMode::Utility).unwrap()).unwrap();
    assert_eq!(count_vars(&model, 'x'), 2);
    assert_eq!(count_vars(&model, 'y'), 4);
    for j in 0..2 {
        for l in 0..2 {
            let c = coefficient(&model, "obj", &format!("y{j}_{l}")).unwrap();
            assert!((c - rows[j][l] / 2.0).abs() < 1e-12);
            let link = model.row(&format!("link_{j}_{l}")).unwrap();
            assert_eq!((link.op.as_str(), link.rhs), ("<=", 0.0));
        }
        let assign = model.row(&format!("assign_{j}")).unwrap();
        assert_eq!((assign.op.as_str(), assign.rhs, assign.terms.len()), ("<=", 1.0, 2));
    }
    assert_eq!(model.row("card").unwrap().rhs, 1.0);

    let bsm = parse_lp(&export_ilp_fl(&b, 1, 0.0, Some(0.3), IlpMode::Bsm).unwrap()).unwrap();
    for i in 0..2 {
        let row = bsm.row(&format!("fair_{i}")).unwrap();
        assert_eq!((row.op.as_str(), row.rhs), (">=", 0.0));
    }
    let robust = parse_lp(&export_ilp_fl(&b, 1, 0.0, None, IlpMode::Robust).unwrap()).unwrap();
    assert_eq!(robust.objective, vec![("w".to_string(), 1.0)]);
    assert_eq!(coefficient(&robust, "group_1", "w"), Some(-1.0));
}

#[test]
fn lp_coefficients_survive_the_text_format() {
    let x = random_facility(3, 10, 14, 2);
    let model = parse_lp(&export_ilp_fl(&x.matrix, 2, 0.0, None, IlpMode::Utility).unwrap()).unwrap();
    for j in 0..14 {
        for l in 0..10 {
            let c = coefficient(&model, "obj", &format!("y{j}_{l}")).unwrap();
            assert_eq!(c, x.rows[j][l] / 14.0);
        }
    }
}

#[test]
fn exact_values_agree_with_set_evaluation() {
    let x = example();
    let r = brute_force(&x, 2, 0.5).unwrap();
    assert_eq!(r.opt_f, eval_f(&x, &r.opt_f_witness).unwrap());
    assert_eq!(r.opt_g, eval_g(&x, &r.opt_g_witness).unwrap());
    assert_eq!(x.num_items(), 4);
}
