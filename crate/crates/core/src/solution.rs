use std::time::Duration;

use crate::error::Result;
use crate::oracle::{GroupUtilityOracle, Selection};

/// Run metadata attached to a [`Solution`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SolutionMeta {
    pub algorithm: String,
    /// Items appended in the second stage of the two-stage greedy.
    pub k_prime: Option<usize>,
    pub alpha_min: Option<f64>,
    pub alpha_max: Option<f64>,
    pub opt_f: Option<f64>,
    pub opt_g: Option<f64>,
    /// True when the solver returned its robust fallback set.
    pub fell_back: bool,
    pub evaluations: u64,
    pub wall_time: Duration,
}

impl SolutionMeta {
    pub fn new(algorithm: impl Into<String>) -> Self {
        Self {
            algorithm: algorithm.into(),
            ..Self::default()
        }
    }
}

/// A selected item set with its utility and fairness values.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    /// Items in insertion order.
    pub items: Vec<usize>,
    pub f_value: f64,
    pub group_values: Vec<f64>,
    pub g_value: f64,
    pub meta: SolutionMeta,
}

impl Solution {
    pub fn evaluate<O: GroupUtilityOracle>(
        oracle: &O,
        items: Vec<usize>,
        meta: SolutionMeta,
    ) -> Result<Self> {
        let sel = Selection::from_items(oracle, &items)?;
        let group_values = sel.group_values();
        Ok(Self {
            items: sel.items().to_vec(),
            f_value: sel.f_value(),
            g_value: crate::oracle::min_of(&group_values),
            group_values,
            meta,
        })
    }

    /// Items sorted ascending, for set comparisons.
    pub fn sorted_items(&self) -> Vec<usize> {
        let mut v = self.items.clone();
        v.sort_unstable();
        v
    }
}
