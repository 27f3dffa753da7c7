use crate::composite::TruncatedComposite;
use crate::error::{Error, Result};
use crate::population::GroupedPopulation;

/// Per-group utility evaluator for a normalized, monotone, submodular family
/// of user utilities `f_u`.
///
/// The interface is incremental: a state stands for a selected set, and
/// `group_gains_into` reports, for every group `i`, how much
/// `sum_{u in U_i} f_u` increases when one more item is added.
pub trait GroupUtilityOracle: Sync {
    type State: Clone + Send;

    fn num_items(&self) -> usize;

    fn population(&self) -> &GroupedPopulation;

    /// State representing the empty set; all group sums are zero.
    fn new_state(&self) -> Self::State;

    /// Writes the increase of each group sum caused by adding `item` into
    /// `out`, which has one slot per group. Values are non-negative.
    fn group_gains_into(&self, state: &Self::State, item: usize, out: &mut [f64]);

    fn commit(&self, state: &mut Self::State, item: usize);

    fn group_gains(&self, state: &Self::State, item: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.population().num_groups()];
        self.group_gains_into(state, item, &mut out);
        out
    }

    fn num_groups(&self) -> usize {
        self.population().num_groups()
    }
}

/// A selected set together with its oracle state and running group sums.
pub struct Selection<'a, O: GroupUtilityOracle> {
    oracle: &'a O,
    state: O::State,
    sums: Vec<f64>,
    items: Vec<usize>,
    chosen: Vec<bool>,
    scratch: Vec<f64>,
}

impl<O: GroupUtilityOracle> Clone for Selection<'_, O> {
    fn clone(&self) -> Self {
        Self {
            oracle: self.oracle,
            state: self.state.clone(),
            sums: self.sums.clone(),
            items: self.items.clone(),
            chosen: self.chosen.clone(),
            scratch: self.scratch.clone(),
        }
    }
}

impl<'a, O: GroupUtilityOracle> Selection<'a, O> {
    pub fn new(oracle: &'a O) -> Self {
        let c = oracle.num_groups();
        Self {
            oracle,
            state: oracle.new_state(),
            sums: vec![0.0; c],
            items: Vec::new(),
            chosen: vec![false; oracle.num_items()],
            scratch: vec![0.0; c],
        }
    }

    /// Replays `items` from the empty set. Duplicates are ignored.
    pub fn from_items(oracle: &'a O, items: &[usize]) -> Result<Self> {
        let mut sel = Self::new(oracle);
        for &v in items {
            sel.insert(v)?;
        }
        Ok(sel)
    }

    pub fn oracle(&self) -> &'a O {
        self.oracle
    }

    pub fn state(&self) -> &O::State {
        &self.state
    }

    /// Adds `item`; returns false if it was already selected.
    pub fn insert(&mut self, item: usize) -> Result<bool> {
        let n = self.oracle.num_items();
        if item >= n {
            return Err(Error::ItemOutOfRange { item, n });
        }
        if self.chosen[item] {
            return Ok(false);
        }
        self.oracle
            .group_gains_into(&self.state, item, &mut self.scratch);
        for (s, d) in self.sums.iter_mut().zip(&self.scratch) {
            *s += d;
        }
        self.oracle.commit(&mut self.state, item);
        self.chosen[item] = true;
        self.items.push(item);
        Ok(true)
    }

    pub fn contains(&self, item: usize) -> bool {
        self.chosen.get(item).copied().unwrap_or(false)
    }

    pub fn items(&self) -> &[usize] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Per-group sums `sum_{u in U_i} f_u(S)`.
    pub fn group_sums(&self) -> &[f64] {
        &self.sums
    }

    /// Group-sum increases for adding `item` to the current set.
    pub fn gains_into(&self, item: usize, out: &mut [f64]) {
        self.oracle.group_gains_into(&self.state, item, out);
    }

    pub fn f_value(&self) -> f64 {
        self.oracle.population().average_of_sums(&self.sums)
    }

    pub fn group_values(&self) -> Vec<f64> {
        self.oracle.population().group_averages(&self.sums)
    }

    pub fn g_value(&self) -> f64 {
        min_of(&self.group_values())
    }
}

pub(crate) fn min_of(values: &[f64]) -> f64 {
    values.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Population-average utility `f(S)`.
pub fn eval_f<O: GroupUtilityOracle>(oracle: &O, items: &[usize]) -> Result<f64> {
    Ok(Selection::from_items(oracle, items)?.f_value())
}

/// Per-group average utilities `f_i(S)`.
pub fn eval_group<O: GroupUtilityOracle>(oracle: &O, items: &[usize]) -> Result<Vec<f64>> {
    Ok(Selection::from_items(oracle, items)?.group_values())
}

/// Maximin fairness `g(S) = min_i f_i(S)`.
pub fn eval_g<O: GroupUtilityOracle>(oracle: &O, items: &[usize]) -> Result<f64> {
    Ok(Selection::from_items(oracle, items)?.g_value())
}

/// Truncated fairness surrogate `(1/c) sum_i min{1, f_i(S) / (tau * optg)}`.
pub fn eval_gtau<O: GroupUtilityOracle>(
    oracle: &O,
    items: &[usize],
    tau: f64,
    optg: f64,
) -> Result<f64> {
    let threshold = positive_threshold("tau * optg", tau * optg)?;
    let composite = TruncatedComposite::group_cover(oracle.num_groups(), threshold)?;
    let sel = Selection::from_items(oracle, items)?;
    Ok(composite.value(oracle.population(), sel.group_sums()))
}

/// Bicriteria surrogate
/// `min{1, f(S) / (alpha * optf)} + (1/c) sum_i min{1, f_i(S) / (tau * optg)}`.
pub fn eval_falpha<O: GroupUtilityOracle>(
    oracle: &O,
    items: &[usize],
    alpha: f64,
    optf: f64,
    tau: f64,
    optg: f64,
) -> Result<f64> {
    let f_threshold = positive_threshold("alpha * optf", alpha * optf)?;
    let g_threshold = positive_threshold("tau * optg", tau * optg)?;
    let composite =
        TruncatedComposite::bicriteria(oracle.num_groups(), f_threshold, Some(g_threshold))?;
    let sel = Selection::from_items(oracle, items)?;
    Ok(composite.value(oracle.population(), sel.group_sums()))
}

fn positive_threshold(name: &str, t: f64) -> Result<f64> {
    if t.is_finite() && t > 0.0 {
        Ok(t)
    } else {
        Err(Error::param(format!("{name} must be positive, got {t}")))
    }
}
