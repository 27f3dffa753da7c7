use std::time::Instant;

use crate::composite::{CompositeObjective, TruncatedComposite, SLACK};
use crate::error::Result;
use crate::oracle::GroupUtilityOracle;
use crate::solution::{Solution, SolutionMeta};

use super::greedy::greedy_max;
use super::{check_baselines, Baselines, BsmParams, BudgetMode};

/// Hard cap on bisection steps; only reached when no factor is ever
/// accepted and the upper end keeps halving towards zero.
const MAX_PROBES: usize = 64;

/// Bisection bookkeeping on the approximation factor `alpha`.
#[derive(Debug, Clone, PartialEq)]
pub struct BisectionState {
    pub alpha_min: f64,
    pub alpha_max: f64,
    /// Items accepted at `alpha_min`.
    pub best: Option<Vec<usize>>,
    pub probes: usize,
}

impl BisectionState {
    fn new() -> Self {
        Self {
            alpha_min: 0.0,
            alpha_max: 1.0,
            best: None,
            probes: 0,
        }
    }

    fn keep_going(&self, eps: f64) -> bool {
        (1.0 - eps) * self.alpha_max > self.alpha_min && self.probes < MAX_PROBES
    }
}

/// Saturate-style bicriteria solver.
///
/// Bisects `alpha` in `[0, 1]`. For each probe it greedily maximizes
/// `F'_alpha = min{1, f / (alpha opt_f)} + (1/c) sum_i min{1, f_i / (tau opt_g)}`
/// and accepts when the greedy value reaches `2 (1 - eps / c)`. Stops once
/// `(1 - eps) alpha_max <= alpha_min` and returns the set accepted at
/// `alpha_min`, or the saturate set if nothing was accepted.
pub fn bsm_saturate<O: GroupUtilityOracle>(oracle: &O, params: &BsmParams) -> Result<Solution> {
    params.validate()?;
    let baselines = Baselines::compute(oracle, params.k)?;
    bsm_saturate_with(oracle, params, &baselines)
}

pub fn bsm_saturate_with<O: GroupUtilityOracle>(
    oracle: &O,
    params: &BsmParams,
    baselines: &Baselines,
) -> Result<Solution> {
    let (solution, _) = bsm_saturate_traced(oracle, params, baselines)?;
    Ok(solution)
}

/// Budget for each greedy probe.
pub(crate) fn probe_budget(params: &BsmParams, n: usize, c: usize) -> usize {
    match params.budget_mode {
        BudgetMode::ExactK => params.k,
        BudgetMode::Inflated => {
            let b = (params.k as f64 * (c as f64 / params.eps).ln()).ceil();
            (b.max(1.0) as usize).min(n)
        }
    }
}

/// Like [`bsm_saturate_with`], also returning the final bisection state.
pub fn bsm_saturate_traced<O: GroupUtilityOracle>(
    oracle: &O,
    params: &BsmParams,
    baselines: &Baselines,
) -> Result<(Solution, BisectionState)> {
    check_baselines(baselines, params)?;
    let start = Instant::now();
    let c = oracle.num_groups();
    let mut meta = SolutionMeta::new("bsm-saturate");
    meta.opt_f = Some(baselines.opt_f);
    meta.opt_g = Some(baselines.opt_g);
    meta.evaluations = baselines.evaluations;

    let mut bisection = BisectionState::new();
    if baselines.opt_f <= 0.0 {
        // f vanishes everywhere; every set is equally good on utility.
        meta.fell_back = true;
        meta.wall_time = baselines.wall_time + start.elapsed();
        let sol = Solution::evaluate(oracle, baselines.s_g.clone(), meta)?;
        return Ok((sol, bisection));
    }

    let g_threshold = Some(params.tau * baselines.opt_g).filter(|&t| t > 0.0);
    // A vacuous fairness part contributes a constant 1.
    let offset = if g_threshold.is_some() { 0.0 } else { 1.0 };
    let target = 2.0 * (1.0 - params.eps / c as f64);
    let budget = probe_budget(params, oracle.num_items(), c);

    while bisection.keep_going(params.eps) {
        let alpha = 0.5 * (bisection.alpha_min + bisection.alpha_max);
        let objective = CompositeObjective::new(
            oracle,
            TruncatedComposite::bicriteria(c, alpha * baselines.opt_f, g_threshold)?,
        );
        let trace = greedy_max(&objective, budget)?;
        meta.evaluations += trace.evaluations;
        bisection.probes += 1;
        if trace.value() + offset >= target - SLACK {
            bisection.alpha_min = alpha;
            bisection.best = Some(trace.items);
        } else {
            bisection.alpha_max = alpha;
        }
    }

    let items = match &bisection.best {
        Some(items) => {
            meta.alpha_min = Some(bisection.alpha_min);
            meta.alpha_max = Some(bisection.alpha_max);
            items.clone()
        }
        None => {
            meta.fell_back = true;
            baselines.s_g.clone()
        }
    };
    meta.wall_time = baselines.wall_time + start.elapsed();
    let sol = Solution::evaluate(oracle, items, meta)?;
    Ok((sol, bisection))
}
