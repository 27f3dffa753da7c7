use crate::composite::{CompositeObjective, TruncatedComposite};
use crate::error::{Error, Result};
use crate::oracle::GroupUtilityOracle;

use super::greedy::{greedy_max, greedy_until};

/// Relative width at which the bisection on the target level stops.
pub const DEFAULT_BISECTION_TOL: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct SaturateOutcome {
    /// Best set found, in insertion order.
    pub items: Vec<usize>,
    /// `g` of `items`; the estimate of the robust optimum.
    pub opt_g: f64,
    /// Largest probed level whose greedy cover saturated.
    pub level: f64,
    pub probes: usize,
    pub evaluations: u64,
}

/// Robust maximization of `g = min_i f_i` under `|S| <= k`.
///
/// Bisects a target level `t` in `[0, t_hi]`, where `t_hi` is the smallest
/// per-group greedy value with budget `k`. For each level the truncated
/// average `(1/c) sum_i min{1, f_i / t}` is maximized greedily with budget
/// `k`; a saturated cover moves the lower end up. `t_hi` itself is probed
/// first. The returned set is the probed greedy set with the largest `g`.
pub fn saturate_rsm<O: GroupUtilityOracle>(
    oracle: &O,
    k: usize,
    bisection_tol: f64,
) -> Result<SaturateOutcome> {
    let n = oracle.num_items();
    if k == 0 || k > n {
        return Err(Error::InvalidBudget { k, n });
    }
    if !(bisection_tol > 0.0 && bisection_tol < 1.0) {
        return Err(Error::param(format!(
            "bisection tolerance {bisection_tol} outside (0, 1)"
        )));
    }
    let c = oracle.num_groups();
    let mut evaluations = 0;

    let mut t_hi = f64::INFINITY;
    for i in 0..c {
        let trace = greedy_max(&CompositeObjective::new(oracle, TruncatedComposite::group(i)), k)?;
        evaluations += trace.evaluations;
        t_hi = t_hi.min(trace.value());
    }
    if t_hi <= 0.0 {
        return Ok(SaturateOutcome {
            items: Vec::new(),
            opt_g: 0.0,
            level: 0.0,
            probes: 0,
            evaluations,
        });
    }

    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut probes = 0;
    let mut probe = |t: f64, evaluations: &mut u64| -> Result<bool> {
        let objective = CompositeObjective::new(oracle, TruncatedComposite::group_cover(c, t)?);
        let (trace, state) = greedy_until(&objective, k, |_| false)?;
        *evaluations += trace.evaluations;
        probes += 1;
        let g = state.g_value();
        if best.as_ref().is_none_or(|(b, _)| g > *b + 1e-12) {
            best = Some((g, trace.items));
        }
        Ok(objective.saturated(&state))
    };

    let mut lo = 0.0;
    let mut hi = t_hi;
    if probe(t_hi, &mut evaluations)? {
        lo = t_hi;
    } else {
        while (hi - lo) / t_hi > bisection_tol {
            let t = 0.5 * (lo + hi);
            if probe(t, &mut evaluations)? {
                lo = t;
            } else {
                hi = t;
            }
        }
    }

    let (opt_g, items) = best.expect("t_hi is always probed");
    Ok(SaturateOutcome {
        items,
        opt_g,
        level: lo,
        probes,
        evaluations,
    })
}
