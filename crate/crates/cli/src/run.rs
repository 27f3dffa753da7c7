use std::collections::BTreeMap;
use std::fmt::Write;
use std::time::{Duration, Instant};

use bsm_core::algorithms::{
    bsm_saturate_with, bsm_tsgreedy_with, Baselines, BsmParams,
};
use bsm_core::exact::{binomial, brute_force};
use bsm_core::problems::mc_estimate;
use bsm_core::rng::derive_seed;
use bsm_core::{GroupUtilityOracle, GroupedPopulation, Solution, SolutionMeta};
use rayon::prelude::*;

use crate::error::{CliError, CliResult};
use crate::instance::{load_instance, Instance, LoadedInstance, MC_STREAM};
use crate::spec::{Algorithm, ExperimentSpec, SweepPoint};

/// Successful outcome of one (sweep value, algorithm) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct RowResult {
    pub items: Vec<usize>,
    pub item_names: Vec<String>,
    pub f: f64,
    pub g: f64,
    pub group_values: Vec<f64>,
    pub k_prime: Option<usize>,
    pub alpha_min: Option<f64>,
    pub alpha_max: Option<f64>,
    pub fell_back: bool,
    pub opt_f: f64,
    pub opt_g: f64,
    /// `tau * opt_g`, the fairness level the algorithm aims for.
    pub reference: f64,
    pub wall_time: Duration,
    pub evaluations: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub axis: Option<&'static str>,
    pub point: SweepPoint,
    pub algorithm: Algorithm,
    pub outcome: Result<RowResult, String>,
}

/// All rows of a sweep, in sweep order then algorithm order.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<Row>,
    pub group_labels: Vec<String>,
    pub group_sizes: Vec<usize>,
    pub num_items: usize,
    pub num_users: usize,
    /// Whether `f`/`g` are Monte-Carlo estimates.
    pub simulated: bool,
    pub mc_reps: usize,
}

impl SweepResult {
    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.outcome.is_err()).count()
    }
}

fn finish<O: GroupUtilityOracle>(
    oracle: &O,
    items: &[usize],
    meta: SolutionMeta,
    opt_f: f64,
    opt_g: f64,
    tau: f64,
) -> CliResult<RowResult> {
    let s = Solution::evaluate(oracle, items.to_vec(), meta)?;
    Ok(RowResult {
        items: s.items,
        item_names: Vec::new(),
        f: s.f_value,
        g: s.g_value,
        group_values: s.group_values,
        k_prime: s.meta.k_prime,
        alpha_min: s.meta.alpha_min,
        alpha_max: s.meta.alpha_max,
        fell_back: s.meta.fell_back,
        opt_f,
        opt_g,
        reference: tau * opt_g,
        wall_time: s.meta.wall_time,
        evaluations: s.meta.evaluations,
    })
}

fn solve<O: GroupUtilityOracle>(
    oracle: &O,
    spec: &ExperimentSpec,
    algorithm: Algorithm,
    point: &SweepPoint,
    index: usize,
    baselines: Option<&Baselines>,
) -> CliResult<RowResult> {
    if algorithm == Algorithm::BruteForce {
        let start = Instant::now();
        let exact = brute_force(oracle, point.k, point.tau)?;
        let mut meta = SolutionMeta::new("brute-force");
        meta.opt_f = Some(exact.opt_f);
        meta.opt_g = Some(exact.opt_g);
        meta.evaluations = u64::try_from(2 * binomial(oracle.num_items(), point.k)).unwrap_or(u64::MAX);
        meta.wall_time = start.elapsed();
        return finish(oracle, &exact.bsm.items, meta, exact.opt_f, exact.opt_g, point.tau);
    }
    let baselines = baselines.expect("baselines are computed for every heuristic row");
    let mut params = BsmParams::new(point.k, point.tau)
        .with_eps(point.eps)
        .with_budget_mode(spec.budget_mode);
    params.seed = derive_seed(spec.seed, index as u64);
    params.validate()?;
    let (opt_f, opt_g) = (baselines.opt_f, baselines.opt_g);
    match algorithm {
        Algorithm::Greedy => {
            let mut meta = SolutionMeta::new("greedy");
            meta.evaluations = baselines.f_trace.evaluations;
            meta.wall_time = baselines.greedy_time;
            finish(oracle, &baselines.f_trace.items, meta, opt_f, opt_g, point.tau)
        }
        Algorithm::Saturate => {
            let mut meta = SolutionMeta::new("saturate");
            meta.evaluations = baselines.saturate_evaluations;
            meta.wall_time = baselines.saturate_time;
            finish(oracle, &baselines.s_g, meta, opt_f, opt_g, point.tau)
        }
        Algorithm::TsGreedy => {
            let s = bsm_tsgreedy_with(oracle, &params, baselines)?;
            finish(oracle, &s.items, s.meta, opt_f, opt_g, point.tau)
        }
        Algorithm::BsmSaturate => {
            let s = bsm_saturate_with(oracle, &params, baselines)?;
            finish(oracle, &s.items, s.meta, opt_f, opt_g, point.tau)
        }
        Algorithm::BruteForce => unreachable!(),
    }
}

fn baselines_for<O: GroupUtilityOracle>(oracle: &O, ks: &[usize]) -> BTreeMap<usize, Result<Baselines, String>> {
    ks.par_iter()
        .map(|&k| (k, Baselines::compute(oracle, k).map_err(|e| e.to_string())))
        .collect()
}

fn run_rows<O: GroupUtilityOracle>(
    oracle: &O,
    spec: &ExperimentSpec,
    loaded: &LoadedInstance,
) -> Vec<Row> {
    let points = spec.points();
    let mut ks: Vec<usize> = points.iter().map(|p| p.k).collect();
    ks.sort_unstable();
    ks.dedup();
    let needs_baselines = spec.algorithms.iter().any(|a| *a != Algorithm::BruteForce);
    let baselines = if needs_baselines {
        baselines_for(oracle, &ks)
    } else {
        BTreeMap::new()
    };
    let tasks: Vec<(usize, SweepPoint, Algorithm)> = points
        .iter()
        .enumerate()
        .flat_map(|(i, p)| spec.algorithms.iter().map(move |&a| (i, *p, a)))
        .collect();
    let axis = spec.sweep.as_ref().map(|s| s.axis.name());
    tasks
        .par_iter()
        .map(|&(index, point, algorithm)| {
            let outcome = (|| -> CliResult<RowResult> {
                let b = match baselines.get(&point.k) {
                    Some(Err(e)) if algorithm != Algorithm::BruteForce => {
                        return Err(CliError::Spec(e.clone()))
                    }
                    Some(b) => b.as_ref().ok(),
                    None => None,
                };
                let mut result = solve(oracle, spec, algorithm, &point, index, b)?;
                if let Instance::Influence { graph, population, .. } = &loaded.instance {
                    let est = mc_estimate(
                        graph,
                        spec.p,
                        &result.items,
                        spec.mc_reps,
                        population,
                        derive_seed(spec.seed, MC_STREAM),
                    )?;
                    result.g = est.g();
                    result.f = est.f;
                    result.group_values = est.group_values;
                }
                result.item_names = result
                    .items
                    .iter()
                    .map(|&v| loaded.item_names[v].clone())
                    .collect();
                Ok(result)
            })();
            Row {
                axis,
                point,
                algorithm,
                outcome: outcome.map_err(|e| e.to_string()),
            }
        })
        .collect()
}

fn run_loaded(spec: &ExperimentSpec, loaded: &LoadedInstance) -> SweepResult {
    let rows = match &loaded.instance {
        Instance::Coverage(x) => run_rows(x, spec, loaded),
        Instance::Facility(x) => run_rows(x, spec, loaded),
        Instance::Influence { oracle, .. } => run_rows(oracle, spec, loaded),
    };
    let pop: &GroupedPopulation = loaded.population();
    SweepResult {
        rows,
        group_labels: loaded.group_labels.clone(),
        group_sizes: pop.group_sizes().to_vec(),
        num_items: loaded.num_items(),
        num_users: pop.num_users(),
        simulated: matches!(loaded.instance, Instance::Influence { .. }),
        mc_reps: spec.mc_reps,
    }
}

fn with_pool<T: Send>(spec: &ExperimentSpec, f: impl FnOnce() -> T + Send) -> CliResult<T> {
    match spec.threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Spec(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// Loads the instance and runs every (sweep value, algorithm) pair. Row
/// failures are recorded in the rows; only spec and instance errors abort.
pub fn run_sweep(spec: &ExperimentSpec) -> CliResult<SweepResult> {
    spec.validate()?;
    with_pool(spec, || {
        let loaded = load_instance(spec)?;
        Ok(run_loaded(spec, &loaded))
    })?
}

/// Runs a spec without a sweep and renders a human-readable report.
pub fn run_single(spec: &ExperimentSpec) -> CliResult<(SweepResult, String)> {
    if spec.sweep.is_some() {
        return Err(CliError::Spec("run_single takes a spec without --sweep".into()));
    }
    let result = run_sweep(spec)?;
    let report = render_report(spec, &result);
    Ok((result, report))
}

/// One-line verdict on the fairness constraint `g >= tau * OPT'_g`.
pub fn verdict(algorithm: Algorithm, r: &RowResult, eps: f64) -> String {
    let opt = if algorithm == Algorithm::BruteForce { "OPT_g" } else { "OPT'_g" };
    if r.reference <= 0.0 {
        return format!("constraint vacuous: tau * {opt} = 0");
    }
    if r.g >= r.reference - 1e-9 {
        format!("satisfied: g={:.4} ≥ {:.4}", r.g, r.reference)
    } else if algorithm == Algorithm::BsmSaturate && r.g >= (1.0 - 2.0 * eps) * r.reference - 1e-9 {
        format!(
            "relaxed: g={:.4} ≥ (1-2eps)·{:.4} = {:.4}",
            r.g,
            r.reference,
            (1.0 - 2.0 * eps) * r.reference
        )
    } else {
        format!("violated: g={:.4} < {:.4}", r.g, r.reference)
    }
}

fn render_report(spec: &ExperimentSpec, result: &SweepResult) -> String {
    let mut out = String::new();
    let groups: Vec<String> = result
        .group_labels
        .iter()
        .zip(&result.group_sizes)
        .map(|(l, s)| format!("{l}: {s}"))
        .collect();
    let _ = writeln!(
        out,
        "instance: {} items, {} users, {} groups ({})",
        result.num_items,
        result.num_users,
        result.group_sizes.len(),
        groups.join(", ")
    );
    let _ = writeln!(out, "k = {}, tau = {}, eps = {}", spec.k, spec.tau, spec.eps);
    if result.simulated {
        let _ = writeln!(out, "f and g are Monte-Carlo estimates over {} cascades", result.mc_reps);
    }
    let label_width = result.group_labels.iter().map(String::len).max().unwrap_or(0).max(5);
    for row in &result.rows {
        let _ = writeln!(out, "\n{}", row.algorithm);
        match &row.outcome {
            Err(e) => {
                let _ = writeln!(out, "  error: {e}");
            }
            Ok(r) => {
                let _ = writeln!(out, "  items: {}", r.item_names.join(" "));
                let mut extra = Vec::new();
                if let Some(kp) = r.k_prime {
                    extra.push(format!("k' = {kp}"));
                }
                if let (Some(lo), Some(hi)) = (r.alpha_min, r.alpha_max) {
                    extra.push(format!("alpha in [{lo}, {hi}]"));
                }
                if r.fell_back {
                    extra.push("fell back to the saturate set".into());
                }
                let _ = writeln!(out, "  f = {:.4}  g = {:.4}", r.f, r.g);
                if !extra.is_empty() {
                    let _ = writeln!(out, "  {}", extra.join(", "));
                }
                let opt = if row.algorithm == Algorithm::BruteForce { "" } else { "'" };
                let _ = writeln!(out, "  OPT{opt}_f = {:.4}  OPT{opt}_g = {:.4}", r.opt_f, r.opt_g);
                let _ = writeln!(out, "  {:<label_width$}  {:>6}  {:>8}", "group", "size", "f_i");
                for ((label, size), value) in result.group_labels.iter().zip(&result.group_sizes).zip(&r.group_values) {
                    let _ = writeln!(out, "  {label:<label_width$}  {size:>6}  {value:>8.4}");
                }
                let _ = writeln!(out, "  {}", verdict(row.algorithm, r, row.point.eps));
            }
        }
    }
    out
}
