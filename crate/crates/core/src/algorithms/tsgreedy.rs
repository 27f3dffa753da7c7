use std::time::Instant;

use crate::composite::{CompositeObjective, TruncatedComposite};
use crate::error::Result;
use crate::oracle::GroupUtilityOracle;
use crate::solution::{Solution, SolutionMeta};

use super::greedy::greedy_until;
use super::{check_baselines, Baselines, BsmParams};

/// Two-stage greedy for the balanced problem.
///
/// Stage 1 greedily covers the truncated fairness surrogate
/// `(1/c) sum_i min{1, f_i / (tau * opt_g)}` until it saturates or `k` items
/// are chosen; an unsaturated size-`k` result is replaced by the saturate
/// set. Stage 2 tops the set up with the `f`-greedy sequence, skipping items
/// already present. `tau = 0` (or a zero robust estimate) reduces to the
/// plain `f`-greedy.
pub fn bsm_tsgreedy<O: GroupUtilityOracle>(oracle: &O, params: &BsmParams) -> Result<Solution> {
    params.validate()?;
    let baselines = Baselines::compute(oracle, params.k)?;
    bsm_tsgreedy_with(oracle, params, &baselines)
}

pub fn bsm_tsgreedy_with<O: GroupUtilityOracle>(
    oracle: &O,
    params: &BsmParams,
    baselines: &Baselines,
) -> Result<Solution> {
    check_baselines(baselines, params)?;
    let start = Instant::now();
    let k = params.k;
    let mut meta = SolutionMeta::new("tsgreedy");
    meta.opt_f = Some(baselines.opt_f);
    meta.opt_g = Some(baselines.opt_g);
    meta.evaluations = baselines.evaluations;

    let threshold = params.tau * baselines.opt_g;
    let items = if threshold <= 0.0 {
        meta.k_prime = Some(k);
        baselines.f_trace.items.clone()
    } else {
        let objective = CompositeObjective::new(
            oracle,
            TruncatedComposite::group_cover(oracle.num_groups(), threshold)?,
        );
        let (trace, mut state) = greedy_until(&objective, k, |s| objective.saturated(s))?;
        meta.evaluations += trace.evaluations;
        if !objective.saturated(&state) {
            meta.fell_back = true;
            meta.k_prime = Some(0);
            baselines.s_g.clone()
        } else {
            let mut added = 0;
            for &v in &baselines.f_trace.items {
                if state.len() == k {
                    break;
                }
                if state.insert(v)? {
                    added += 1;
                }
            }
            meta.k_prime = Some(added);
            state.items().to_vec()
        }
    };
    meta.wall_time = baselines.wall_time + start.elapsed();
    Solution::evaluate(oracle, items, meta)
}
