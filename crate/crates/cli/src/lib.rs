//! Experiment harness: builds instances from files or generators, runs the
//! solvers over a parameter sweep, and writes CSV or JSON-lines tables.

mod error;
mod instance;
mod output;
mod run;
mod spec;

pub use error::{CliError, CliResult};
pub use instance::{load_instance, Instance, LoadedInstance};
pub use output::{write_csv, write_jsonl, write_table};
pub use run::{run_single, run_sweep, verdict, Row, RowResult, SweepResult};
pub use spec::{
    parse_kernel, Algorithm, ExperimentSpec, Format, Generator, Problem, Source, Sweep,
    SweepAxis, SweepPoint, DEFAULT_K, DEFAULT_TAU,
};
