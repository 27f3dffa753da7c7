//! Ground truth for small instances: exhaustive enumeration of size-`k`
//! sets, exact independent-cascade spread by live-edge enumeration, and ILP
//! export in LP file format.

mod enumerate;
mod ic;
pub mod lp;

pub use enumerate::{binomial, brute_force, BsmWitness, ExactResult, MAX_SUBSETS};
pub use ic::{live_edge_spread, MAX_LIVE_EDGE_EDGES};
pub use lp::{export_ilp_fl, export_ilp_mc, format_coef, parse_lp, IlpMode, LpModel, LpRow};
