//! Greedy, robust (saturate) and bicriteria solvers.

mod bsm_saturate;
pub mod greedy;
mod saturate;
mod tsgreedy;

use std::time::{Duration, Instant};

use crate::composite::{CompositeObjective, TruncatedComposite};
use crate::error::{Error, Result};
use crate::oracle::GroupUtilityOracle;

pub use bsm_saturate::{bsm_saturate, bsm_saturate_traced, bsm_saturate_with, BisectionState};
pub use greedy::{greedy_max, greedy_until, naive_greedy, GreedyTrace, Objective, TIE_TOL};
pub use saturate::{saturate_rsm, SaturateOutcome, DEFAULT_BISECTION_TOL};
pub use tsgreedy::{bsm_tsgreedy, bsm_tsgreedy_with};

/// Default error parameter for the bisection on the approximation factor.
pub const DEFAULT_EPS: f64 = 0.05;

/// Solution-size rule for the per-factor greedy runs of the saturate-based
/// bicriteria solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BudgetMode {
    /// Exactly `k` items.
    #[default]
    ExactK,
    /// `ceil(k * ln(c / eps))` items, capped at `n`.
    Inflated,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BsmParams {
    pub k: usize,
    pub tau: f64,
    pub eps: f64,
    pub budget_mode: BudgetMode,
    pub seed: u64,
}

impl BsmParams {
    pub fn new(k: usize, tau: f64) -> Self {
        Self {
            k,
            tau,
            eps: DEFAULT_EPS,
            budget_mode: BudgetMode::ExactK,
            seed: 0,
        }
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }

    pub fn with_budget_mode(mut self, mode: BudgetMode) -> Self {
        self.budget_mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::param("k must be >= 1"));
        }
        if !(0.0..=1.0).contains(&self.tau) {
            return Err(Error::param(format!("tau = {} outside [0, 1]", self.tau)));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(Error::param(format!("eps = {} outside (0, 1)", self.eps)));
        }
        Ok(())
    }
}

/// Estimates shared by both bicriteria solvers: the greedy solution for `f`
/// and the saturate solution for `g`, both with budget `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Baselines {
    pub k: usize,
    pub f_trace: GreedyTrace,
    pub opt_f: f64,
    pub s_g: Vec<usize>,
    pub opt_g: f64,
    pub saturate_evaluations: u64,
    /// Total over both subroutines.
    pub evaluations: u64,
    pub greedy_time: Duration,
    pub saturate_time: Duration,
    pub wall_time: Duration,
}

impl Baselines {
    pub fn compute<O: GroupUtilityOracle>(oracle: &O, k: usize) -> Result<Self> {
        Self::compute_with_tol(oracle, k, DEFAULT_BISECTION_TOL)
    }

    pub fn compute_with_tol<O: GroupUtilityOracle>(
        oracle: &O,
        k: usize,
        bisection_tol: f64,
    ) -> Result<Self> {
        let start = Instant::now();
        let f_trace = greedy_max(&average_objective(oracle), k)?;
        let greedy_time = start.elapsed();
        let sat = saturate_rsm(oracle, k, bisection_tol)?;
        let wall_time = start.elapsed();
        Ok(Self {
            k,
            opt_f: f_trace.value(),
            evaluations: f_trace.evaluations + sat.evaluations,
            saturate_evaluations: sat.evaluations,
            f_trace,
            s_g: sat.items,
            opt_g: sat.opt_g,
            greedy_time,
            saturate_time: wall_time - greedy_time,
            wall_time,
        })
    }
}

pub(crate) fn average_objective<O: GroupUtilityOracle>(oracle: &O) -> CompositeObjective<'_, O> {
    CompositeObjective::new(oracle, TruncatedComposite::average())
}

pub(crate) fn check_baselines(baselines: &Baselines, params: &BsmParams) -> Result<()> {
    params.validate()?;
    if baselines.k != params.k {
        return Err(Error::param(format!(
            "baselines computed for k = {}, params ask for k = {}",
            baselines.k, params.k
        )));
    }
    Ok(())
}
