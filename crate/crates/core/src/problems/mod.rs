//! Concrete utility oracles: maximum coverage, influence maximization under
//! the independent cascade model, and facility location.

mod coverage;
mod facility;
mod graph;
mod influence;

pub use coverage::{coverage_from_digraph, CoverageInstance};
pub use facility::{facility_location, BenefitMatrix, Kernel};
pub use graph::Digraph;
pub use influence::{
    build_rr_oracle, mc_estimate, RrSetOracle, SpreadEstimate, DEFAULT_MC_REPS,
    DEFAULT_PROBABILITY, DEFAULT_RR_SAMPLES,
};
