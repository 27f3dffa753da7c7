//! Cardinality-constrained greedy maximization with lazy (accelerated)
//! marginal-gain evaluation.
//!
//! Ties are resolved deterministically: among items whose marginal gain is
//! within [`TIE_TOL`] of the step's best gain, the lowest item index wins. The
//! lazy implementation returns exactly the sequence of [`naive_greedy`].

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Gains closer than this are treated as equal for tie-breaking.
pub const TIE_TOL: f64 = 1e-9;

/// A monotone submodular set function over items `0..n`, evaluated
/// incrementally.
pub trait Objective {
    type State;

    fn num_items(&self) -> usize;

    fn init(&self) -> Self::State;

    /// Marginal gain of adding `item` to the state's set.
    fn gain(&self, state: &Self::State, item: usize) -> f64;

    fn commit(&self, state: &mut Self::State, item: usize);

    fn value(&self, state: &Self::State) -> f64;
}

/// Greedy output: items in insertion order and the objective after each
/// insertion.
#[derive(Debug, Clone, PartialEq)]
pub struct GreedyTrace {
    pub items: Vec<usize>,
    pub prefix_values: Vec<f64>,
    /// Number of marginal-gain evaluations performed.
    pub evaluations: u64,
}

impl GreedyTrace {
    /// Objective value of the full trace (0 for an empty trace).
    pub fn value(&self) -> f64 {
        self.prefix_values.last().copied().unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, Copy)]
struct Entry {
    bound: f64,
    item: usize,
    stamp: usize,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    // Max-heap on the bound; lower index first on equal bounds.
    fn cmp(&self, other: &Self) -> Ordering {
        self.bound
            .total_cmp(&other.bound)
            .then_with(|| other.item.cmp(&self.item))
    }
}

fn check_budget(n: usize, k: usize) -> Result<()> {
    if k == 0 || k > n {
        Err(Error::InvalidBudget { k, n })
    } else {
        Ok(())
    }
}

/// Selects exactly `k` items greedily (zero-gain steps fall back to the
/// lowest unused index).
pub fn greedy_max<F: Objective>(objective: &F, k: usize) -> Result<GreedyTrace> {
    greedy_until(objective, k, |_| false).map(|(trace, _)| trace)
}

/// Lazy greedy that also stops as soon as `stop(state)` holds (checked
/// before each step). Returns the final state alongside the trace.
pub fn greedy_until<F, P>(objective: &F, k: usize, stop: P) -> Result<(GreedyTrace, F::State)>
where
    F: Objective,
    P: Fn(&F::State) -> bool,
{
    let n = objective.num_items();
    check_budget(n, k)?;

    let mut state = objective.init();
    let mut trace = GreedyTrace {
        items: Vec::with_capacity(k),
        prefix_values: Vec::with_capacity(k),
        evaluations: 0,
    };
    let mut heap: BinaryHeap<Entry> = (0..n)
        .map(|item| Entry {
            bound: objective.gain(&state, item),
            item,
            stamp: 0,
        })
        .collect();
    trace.evaluations += n as u64;

    let mut parked = Vec::new();
    let mut tied = Vec::new();
    for step in 0..k {
        if stop(&state) {
            break;
        }
        // Refresh stale bounds until the top is exact; it is then the max.
        loop {
            let top = *heap.peek().expect("heap holds every unselected item");
            if top.stamp == step {
                break;
            }
            heap.pop();
            trace.evaluations += 1;
            heap.push(Entry {
                bound: objective.gain(&state, top.item),
                item: top.item,
                stamp: step,
            });
        }
        let best = heap.peek().map(|e| e.bound).unwrap();

        // Every item that could still tie with `best` must be refreshed so
        // the lowest-index rule matches the naive scan.
        while let Some(&top) = heap.peek() {
            if top.bound < best - TIE_TOL {
                break;
            }
            heap.pop();
            let entry = if top.stamp == step {
                top
            } else {
                trace.evaluations += 1;
                Entry {
                    bound: objective.gain(&state, top.item),
                    item: top.item,
                    stamp: step,
                }
            };
            if entry.bound >= best - TIE_TOL {
                tied.push(entry);
            } else {
                parked.push(entry);
            }
        }
        let pick = tied
            .iter()
            .enumerate()
            .min_by_key(|(_, e)| e.item)
            .map(|(i, _)| i)
            .unwrap();
        let chosen = tied.swap_remove(pick);
        heap.extend(parked.drain(..));
        heap.extend(tied.drain(..));

        objective.commit(&mut state, chosen.item);
        trace.items.push(chosen.item);
        trace.prefix_values.push(objective.value(&state));
    }
    Ok((trace, state))
}

/// Reference greedy that re-evaluates every unselected item at every step.
pub fn naive_greedy<F: Objective>(objective: &F, k: usize) -> Result<GreedyTrace> {
    let n = objective.num_items();
    check_budget(n, k)?;
    let mut state = objective.init();
    let mut used = vec![false; n];
    let mut trace = GreedyTrace {
        items: Vec::with_capacity(k),
        prefix_values: Vec::with_capacity(k),
        evaluations: 0,
    };
    for _ in 0..k {
        let gains: Vec<(usize, f64)> = (0..n)
            .filter(|&v| !used[v])
            .map(|v| (v, objective.gain(&state, v)))
            .collect();
        trace.evaluations += gains.len() as u64;
        let best = gains.iter().map(|&(_, g)| g).fold(f64::NEG_INFINITY, f64::max);
        let (item, _) = *gains
            .iter()
            .find(|&&(_, g)| g >= best - TIE_TOL)
            .unwrap();
        used[item] = true;
        objective.commit(&mut state, item);
        trace.items.push(item);
        trace.prefix_values.push(objective.value(&state));
    }
    Ok(trace)
}
