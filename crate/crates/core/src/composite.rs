use std::cell::RefCell;

use crate::error::{Error, Result};
use crate::algorithms::Objective;
use crate::oracle::{GroupUtilityOracle, Selection};
use crate::population::GroupedPopulation;

/// Absolute slack for saturation tests on truncated terms.
pub const SLACK: f64 = 1e-9;

/// Which average a term reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    /// The population average `f(S)`.
    Average,
    /// The average `f_i(S)` of one group.
    Group(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub scope: Scope,
    pub weight: f64,
    /// `None` keeps the term linear; `Some(t)` contributes `min{1, s / t}`.
    pub threshold: Option<f64>,
}

impl Term {
    pub fn linear(scope: Scope, weight: f64) -> Self {
        Self {
            scope,
            weight,
            threshold: None,
        }
    }

    pub fn truncated(scope: Scope, weight: f64, threshold: f64) -> Self {
        Self {
            scope,
            weight,
            threshold: Some(threshold),
        }
    }
}

/// Non-negative combination of (optionally truncated) population and group
/// averages: `F(S) = sum_j w_j * min{1, s_j(S) / t_j}`.
///
/// Truncated terms saturate at 1 once `s_j >= t_j - SLACK`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedComposite {
    terms: Vec<Term>,
}

#[inline]
fn truncate(x: f64, t: f64) -> f64 {
    if x >= t - SLACK {
        1.0
    } else {
        x / t
    }
}

impl TruncatedComposite {
    pub fn new(terms: Vec<Term>) -> Result<Self> {
        for term in &terms {
            if !(term.weight.is_finite() && term.weight >= 0.0) {
                return Err(Error::param(format!("term weight {} must be >= 0", term.weight)));
            }
            if let Some(t) = term.threshold {
                if !(t.is_finite() && t > 0.0) {
                    return Err(Error::param(format!("term threshold {t} must be > 0")));
                }
            }
        }
        Ok(Self { terms })
    }

    /// `f(S)`.
    pub fn average() -> Self {
        Self {
            terms: vec![Term::linear(Scope::Average, 1.0)],
        }
    }

    /// `f_i(S)` for a single group.
    pub fn group(group: usize) -> Self {
        Self {
            terms: vec![Term::linear(Scope::Group(group), 1.0)],
        }
    }

    /// `(1/c) sum_i min{1, f_i(S) / threshold}`.
    pub fn group_cover(c: usize, threshold: f64) -> Result<Self> {
        let w = 1.0 / c as f64;
        Self::new(
            (0..c)
                .map(|i| Term::truncated(Scope::Group(i), w, threshold))
                .collect(),
        )
    }

    /// `min{1, f(S) / f_threshold} + (1/c) sum_i min{1, f_i(S) / g_threshold}`.
    ///
    /// With `g_threshold = None` the fairness part is vacuous and is folded
    /// into a constant 1, which callers account for via [`Self::offset`].
    pub fn bicriteria(c: usize, f_threshold: f64, g_threshold: Option<f64>) -> Result<Self> {
        let mut terms = vec![Term::truncated(Scope::Average, 1.0, f_threshold)];
        if let Some(t) = g_threshold {
            let w = 1.0 / c as f64;
            terms.extend((0..c).map(|i| Term::truncated(Scope::Group(i), w, t)));
        }
        Self::new(terms)
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// Upper end of the value range, `sum_j w_j` for truncated terms.
    pub fn max_value(&self) -> f64 {
        self.terms.iter().map(|t| t.weight).sum()
    }

    fn read(pop: &GroupedPopulation, scope: Scope, sums: &[f64]) -> f64 {
        match scope {
            Scope::Average => pop.average_of_sums(sums),
            Scope::Group(i) => sums[i] / pop.group_size(i) as f64,
        }
    }

    /// Value given per-group utility sums.
    pub fn value(&self, pop: &GroupedPopulation, sums: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|term| {
                let s = Self::read(pop, term.scope, sums);
                term.weight
                    * match term.threshold {
                        Some(t) => truncate(s, t),
                        None => s,
                    }
            })
            .sum()
    }

    /// Increase of the value when the group sums grow by `delta`.
    pub fn gain(&self, pop: &GroupedPopulation, sums: &[f64], delta: &[f64]) -> f64 {
        let mut total = 0.0;
        for term in &self.terms {
            let (before, step) = match term.scope {
                Scope::Average => (
                    pop.average_of_sums(sums),
                    pop.average_of_sums(delta),
                ),
                Scope::Group(i) => {
                    let m_i = pop.group_size(i) as f64;
                    (sums[i] / m_i, delta[i] / m_i)
                }
            };
            if step <= 0.0 {
                continue;
            }
            total += term.weight
                * match term.threshold {
                    None => step,
                    Some(t) => {
                        let lo = truncate(before, t);
                        if lo >= 1.0 {
                            0.0
                        } else {
                            truncate(before + step, t) - lo
                        }
                    }
                };
        }
        total
    }

    /// True when every truncated term has reached its threshold (within
    /// [`SLACK`]).
    pub fn saturated(&self, pop: &GroupedPopulation, sums: &[f64]) -> bool {
        self.terms.iter().all(|term| match term.threshold {
            Some(t) => Self::read(pop, term.scope, sums) >= t - SLACK,
            None => true,
        })
    }
}

/// Adapts a composite over an oracle to the greedy [`Objective`] interface.
pub struct CompositeObjective<'a, O: GroupUtilityOracle> {
    oracle: &'a O,
    composite: TruncatedComposite,
    scratch: RefCell<Vec<f64>>,
}

impl<'a, O: GroupUtilityOracle> CompositeObjective<'a, O> {
    pub fn new(oracle: &'a O, composite: TruncatedComposite) -> Self {
        Self {
            oracle,
            composite,
            scratch: RefCell::new(vec![0.0; oracle.num_groups()]),
        }
    }

    pub fn composite(&self) -> &TruncatedComposite {
        &self.composite
    }

    pub fn saturated(&self, state: &Selection<'a, O>) -> bool {
        self.composite
            .saturated(self.oracle.population(), state.group_sums())
    }
}

impl<'a, O: GroupUtilityOracle> Objective for CompositeObjective<'a, O> {
    type State = Selection<'a, O>;

    fn num_items(&self) -> usize {
        self.oracle.num_items()
    }

    fn init(&self) -> Self::State {
        Selection::new(self.oracle)
    }

    fn gain(&self, state: &Self::State, item: usize) -> f64 {
        if state.contains(item) {
            return 0.0;
        }
        let mut delta = self.scratch.borrow_mut();
        state.gains_into(item, &mut delta);
        self.composite
            .gain(self.oracle.population(), state.group_sums(), &delta)
    }

    fn commit(&self, state: &mut Self::State, item: usize) {
        state
            .insert(item)
            .expect("greedy only proposes in-range items");
    }

    fn value(&self, state: &Self::State) -> f64 {
        self.composite
            .value(self.oracle.population(), state.group_sums())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pop() -> GroupedPopulation {
        GroupedPopulation::from_sizes(&[2, 2]).unwrap()
    }

    #[test]
    fn value_range_and_saturation() {
        let c = TruncatedComposite::group_cover(2, 0.5).unwrap();
        let p = pop();
        assert_eq!(c.value(&p, &[0.0, 0.0]), 0.0);
        assert!((c.value(&p, &[0.5, 0.0]) - 0.25).abs() < 1e-15);
        assert_eq!(c.value(&p, &[2.0, 1.0]), c.max_value());
        assert!(c.saturated(&p, &[1.0, 1.0 - 1e-10]));
        assert!(!c.saturated(&p, &[1.0, 0.9]));
    }

    #[test]
    fn gain_matches_value_difference() {
        let c = TruncatedComposite::bicriteria(2, 0.4, Some(0.3)).unwrap();
        let p = pop();
        let sums = [0.2, 0.5];
        let delta = [0.3, 0.4];
        let after = [0.5, 0.9];
        let g = c.gain(&p, &sums, &delta);
        assert!((g - (c.value(&p, &after) - c.value(&p, &sums))).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_terms() {
        assert!(TruncatedComposite::group_cover(2, 0.0).is_err());
        assert!(TruncatedComposite::new(vec![Term::linear(Scope::Average, -1.0)]).is_err());
    }
}
