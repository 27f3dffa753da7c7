//! Bicriteria submodular maximization: choose `k` items that maximize the
//! population-average utility `f` while keeping the maximin group utility
//! `g` above a fraction `tau` of its optimum.
//!
//! * [`oracle`] and [`composite`] define per-group utility oracles and the
//!   truncated surrogates the solvers optimize.
//! * [`algorithms`] holds lazy greedy, saturate, and the two bicriteria
//!   solvers ([`algorithms::bsm_tsgreedy`], [`algorithms::bsm_saturate`]).
//! * [`problems`] builds coverage, influence and facility-location oracles.
//! * [`exact`] enumerates small instances and exports ILPs in LP format.
//! * [`data`] loads datasets and generates synthetic instances.

pub mod algorithms;
pub mod composite;
pub mod data;
mod error;
pub mod exact;
pub mod oracle;
mod population;
pub mod problems;
pub mod rng;
mod solution;

pub use error::{Error, Result};
pub use oracle::{eval_f, eval_falpha, eval_g, eval_group, eval_gtau, GroupUtilityOracle, Selection};
pub use population::GroupedPopulation;
pub use solution::{Solution, SolutionMeta};
