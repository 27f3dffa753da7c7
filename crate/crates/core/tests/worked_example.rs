mod common;

use bsm_core::algorithms::{
    bsm_saturate_traced, bsm_tsgreedy, greedy_max, saturate_rsm, Baselines, BsmParams,
    DEFAULT_BISECTION_TOL,
};
use bsm_core::composite::{CompositeObjective, TruncatedComposite};
use bsm_core::exact::brute_force;
use bsm_core::{eval_f, eval_falpha, eval_g, eval_group, eval_gtau, GroupUtilityOracle};
use common::{close, example, example_from_files, subsets};

const OPT_G: f64 = 5.0 / 9.0;

#[test]
fn evaluations() {
    let x = example();
    assert!(close(eval_f(&x, &[0, 1]).unwrap(), 0.75));
    assert!(close(eval_f(&x, &[0, 2]).unwrap(), 8.0 / 12.0));
    assert_eq!(eval_f(&x, &[]).unwrap(), 0.0);

    let g14 = eval_group(&x, &[0, 3]).unwrap();
    assert!(close(g14[0], 5.0 / 9.0) && close(g14[1], 2.0 / 3.0));
    let g12 = eval_group(&x, &[0, 1]).unwrap();
    assert!(close(g12[0], 1.0) && close(g12[1], 0.0));
    assert_eq!(eval_group(&x, &[]).unwrap(), vec![0.0, 0.0]);

    assert!(close(eval_g(&x, &[0, 3]).unwrap(), 5.0 / 9.0));
    assert!(close(eval_g(&x, &[0, 2]).unwrap(), 1.0 / 3.0));
    assert_eq!(eval_g(&x, &[]).unwrap(), 0.0);
    assert!(eval_f(&x, &[4]).is_err());
}

#[test]
fn truncated_composites() {
    let x = example();
    assert!(close(eval_gtau(&x, &[2], 0.2, OPT_G).unwrap(), 1.0));
    assert!(close(eval_gtau(&x, &[2], 0.5, OPT_G).unwrap(), 0.9));
    assert!(close(eval_gtau(&x, &[2], 0.8, OPT_G).unwrap(), 0.625));
    assert_eq!(eval_gtau(&x, &[], 0.5, OPT_G).unwrap(), 0.0);
    assert!(close(eval_gtau(&x, &[0, 2], 0.5, OPT_G).unwrap(), 1.0));
    assert!(close(eval_gtau(&x, &[1, 2], 0.5, OPT_G).unwrap(), 1.0));

    let fa = eval_falpha(&x, &[0, 2], 0.9375, 0.75, 0.2, OPT_G).unwrap();
    assert!(close(fa, (8.0 / 12.0) / (0.9375 * 0.75) + 1.0));
    assert!((fa - 1.9481).abs() < 1e-4);
    assert!(close(eval_falpha(&x, &[0, 2], 0.875, 0.75, 0.8, OPT_G).unwrap(), 1.875));
    assert_eq!(eval_falpha(&x, &[], 0.5, 0.75, 0.2, OPT_G).unwrap(), 0.0);
    assert!(eval_gtau(&x, &[2], 0.0, OPT_G).is_err());
    assert!(eval_falpha(&x, &[2], 0.5, 0.0, 0.5, OPT_G).is_err());
}

#[test]
fn greedy_on_utility() {
    let x = example();
    let trace = greedy_max(&CompositeObjective::new(&x, TruncatedComposite::average()), 2).unwrap();
    assert_eq!(trace.items, vec![0, 1]);
    assert!(close(trace.value(), 0.75));
    let one = greedy_max(&CompositeObjective::new(&x, TruncatedComposite::average()), 1).unwrap();
    assert_eq!(one.items, vec![0]);
}

#[test]
fn saturate_finds_the_robust_optimum() {
    let x = example();
    let sat = saturate_rsm(&x, 2, DEFAULT_BISECTION_TOL).unwrap();
    let mut items = sat.items.clone();
    items.sort();
    assert_eq!(items, vec![0, 3]);
    assert!(close(sat.opt_g, OPT_G));
    assert!(close(brute_force(&x, 2, 0.5).unwrap().opt_g, OPT_G));

    let all = saturate_rsm(&x, 4, DEFAULT_BISECTION_TOL).unwrap();
    assert!(close(all.opt_g, eval_g(&x, &[0, 1, 2, 3]).unwrap()));
}

#[test]
fn tsgreedy_examples() {
    let x = example();
    let run = |tau: f64| bsm_tsgreedy(&x, &BsmParams::new(2, tau)).unwrap();

    let s = run(0.2);
    assert_eq!(s.items, vec![2, 0]);
    assert_eq!(s.meta.k_prime, Some(1));
    assert!(!s.meta.fell_back);

    let s = run(0.5);
    assert_eq!(s.items, vec![2, 0]);

    let s = run(0.8);
    assert_eq!(s.sorted_items(), vec![0, 3]);
    assert!(s.meta.fell_back);
    assert!(close(s.g_value, OPT_G));
    assert!(close(s.meta.opt_f.unwrap(), 0.75));
    assert!(close(s.meta.opt_g.unwrap(), OPT_G));
}

#[test]
fn bsm_saturate_examples() {
    let x = example();
    let baselines = Baselines::compute(&x, 2).unwrap();
    let run = |tau: f64| {
        let params = BsmParams::new(2, tau).with_eps(0.1);
        bsm_saturate_traced(&x, &params, &baselines).unwrap()
    };

    let (s, state) = run(0.2);
    assert_eq!(s.sorted_items(), vec![0, 2]);
    assert!(close(state.alpha_min, 0.9375));
    assert!(close(state.alpha_max, 1.0));
    assert_eq!(state.probes, 4);
    assert_eq!(s.meta.alpha_min, Some(state.alpha_min));

    let (s, _) = run(0.5);
    assert_eq!(s.sorted_items(), vec![0, 2]);

    let (s, state) = run(0.8);
    assert_eq!(s.sorted_items(), vec![0, 3]);
    assert!(close(state.alpha_min, 0.8125));
    assert!(close(state.alpha_max, 0.875));
    assert_eq!(state.probes, 4);
}

#[test]
fn exhaustive_optima() {
    let x = example();
    let r = brute_force(&x, 2, 0.5).unwrap();
    assert!(close(r.opt_f, 0.75));
    assert_eq!(r.opt_f_witness, vec![0, 1]);
    assert_eq!(r.opt_g_witness, vec![0, 3]);
    assert_eq!(r.bsm.items, vec![0, 2]);
    assert!(close(r.bsm.f, 8.0 / 12.0));

    let r = brute_force(&x, 2, 0.9).unwrap();
    assert_eq!(r.bsm.items, vec![0, 3]);
    assert!(close(r.bsm.f, 7.0 / 12.0));

    let r = brute_force(&x, 4, 1.0).unwrap();
    assert!(close(r.opt_f, eval_f(&x, &[0, 1, 2, 3]).unwrap()));
}

#[test]
fn fixture_files_match_the_direct_construction() {
    let direct = example();
    let loaded = example_from_files();
    assert_eq!(loaded.num_items(), 4);
    assert_eq!(loaded.population().group_sizes(), &[9, 3]);
    assert!(close(eval_f(&loaded, &[0, 1]).unwrap(), 0.75));
    for k in 0..=4 {
        for s in subsets(4, k) {
            assert_eq!(eval_group(&loaded, &s).unwrap(), eval_group(&direct, &s).unwrap());
        }
    }
}
