use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use bsm_cli::{
    load_instance, parse_kernel, run_single, run_sweep, write_table, Algorithm, CliError,
    CliResult, ExperimentSpec, Format, Generator, Instance, Problem, Source, Sweep,
};
use bsm_core::algorithms::BudgetMode;
use bsm_core::exact::{brute_force, export_ilp_fl, export_ilp_mc, IlpMode};
use clap::Parser;

/// Balanced utility/fairness subset selection experiments.
#[derive(Debug, Parser)]
#[command(name = "bsm", version)]
struct Args {
    /// Problem: mc (maximum coverage), im (influence maximization), fl (facility location).
    #[arg(long)]
    problem: String,
    /// Edge list, one `src<TAB>dst` pair per line.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Treat the edge list as directed.
    #[arg(long)]
    directed: bool,
    /// Group assignments, one `id<TAB>label` pair per line.
    #[arg(long)]
    groups: Option<PathBuf>,
    /// Points CSV `id,group,x1,...,xd` (users double as facilities).
    #[arg(long)]
    points: Option<PathBuf>,
    /// Set system, one `item<TAB>user` pair per line.
    #[arg(long)]
    sets: Option<PathBuf>,
    /// Generator: sbm:n=..,props=a/b,pin=..,pout=..,directed=.. | blobs:counts=a/b,dim=..,sigma=..,width=.. | hard:k=..,alpha=..,m=..
    #[arg(long = "gen")]
    generator: Option<String>,
    /// Algorithm to run; repeatable. greedy, saturate, tsgreedy, bsm-saturate, brute-force.
    #[arg(long = "alg")]
    algorithms: Vec<String>,
    /// Sweep axis and values: tau=0.1:0.9:0.1, k=5:50:5, eps=0.05,0.1
    #[arg(long)]
    sweep: Option<String>,
    #[arg(long, default_value_t = bsm_cli::DEFAULT_K)]
    k: usize,
    #[arg(long, default_value_t = bsm_cli::DEFAULT_TAU)]
    tau: f64,
    #[arg(long, default_value_t = bsm_core::algorithms::DEFAULT_EPS)]
    eps: f64,
    /// Greedy budget inside bsm-saturate: exact (k) or inflated (k ln(c/eps)).
    #[arg(long, default_value = "exact")]
    budget: String,
    /// Edge propagation probability for im.
    #[arg(long, default_value_t = bsm_core::problems::DEFAULT_PROBABILITY)]
    p: f64,
    /// Reverse-reachable sets sampled for im.
    #[arg(long, default_value_t = bsm_core::problems::DEFAULT_RR_SAMPLES)]
    rr: usize,
    /// Monte-Carlo cascades used to evaluate im solutions.
    #[arg(long, default_value_t = bsm_core::problems::DEFAULT_MC_REPS)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Facility-location kernel: rbf, kmedian, kmedian:dbar=<d>.
    #[arg(long, default_value = "rbf")]
    kernel: String,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json (JSON lines).
    #[arg(long, default_value = "csv")]
    format: String,
    /// Worker threads; all cores when omitted.
    #[arg(long)]
    threads: Option<usize>,
    /// Leave the wall_ms column empty so output is byte-identical across runs.
    #[arg(long)]
    no_timing: bool,
    /// Write the ILP of the instance in LP format to this path instead of solving.
    #[arg(long)]
    export_lp: Option<PathBuf>,
    /// ILP variant for --export-lp: utility, robust or bsm.
    #[arg(long, default_value = "utility")]
    lp_mode: String,
    /// OPT_g for --lp-mode bsm; computed by enumeration when omitted.
    #[arg(long)]
    opt_g: Option<f64>,
}

fn source(args: &Args) -> CliResult<Source> {
    let need_groups = || {
        args.groups
            .clone()
            .ok_or_else(|| CliError::Spec("--groups is required with --graph and --sets".into()))
    };
    let given = [args.generator.is_some(), args.sets.is_some(), args.points.is_some(), args.graph.is_some()];
    if given.iter().filter(|&&g| g).count() != 1 {
        return Err(CliError::Spec(
            "give exactly one instance source: --gen, --sets, --points or --graph".into(),
        ));
    }
    if let Some(g) = &args.generator {
        return Ok(Source::Generated(g.parse::<Generator>()?));
    }
    if let Some(sets) = &args.sets {
        return Ok(Source::Sets {
            sets: sets.clone(),
            groups: need_groups()?,
        });
    }
    if let Some(points) = &args.points {
        return Ok(Source::Points { points: points.clone() });
    }
    Ok(Source::Graph {
        graph: args.graph.clone().expect("checked above"),
        groups: need_groups()?,
        directed: args.directed,
    })
}

fn build_spec(args: &Args) -> CliResult<ExperimentSpec> {
    let mut spec = ExperimentSpec::new(args.problem.parse::<Problem>()?, source(args)?);
    if !args.algorithms.is_empty() {
        spec.algorithms = args
            .algorithms
            .iter()
            .map(|a| a.parse::<Algorithm>())
            .collect::<CliResult<_>>()?;
    }
    spec.sweep = args.sweep.as_deref().map(str::parse::<Sweep>).transpose()?;
    spec.k = args.k;
    spec.tau = args.tau;
    spec.eps = args.eps;
    spec.budget_mode = match args.budget.as_str() {
        "exact" => BudgetMode::ExactK,
        "inflated" => BudgetMode::Inflated,
        other => return Err(CliError::Spec(format!("unknown budget mode `{other}`"))),
    };
    spec.p = args.p;
    spec.rr_samples = args.rr;
    spec.mc_reps = args.reps;
    spec.seed = args.seed;
    spec.kernel = parse_kernel(&args.kernel)?;
    spec.out = args.out.clone();
    spec.format = args.format.parse::<Format>()?;
    spec.threads = args.threads;
    spec.timing = !args.no_timing;
    spec.validate()?;
    Ok(spec)
}

fn open_out(path: Option<&PathBuf>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| CliError::Output(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn export_lp(args: &Args, spec: &ExperimentSpec, path: &PathBuf) -> CliResult<()> {
    let mode = match args.lp_mode.as_str() {
        "utility" => IlpMode::Utility,
        "robust" => IlpMode::Robust,
        "bsm" => IlpMode::Bsm,
        other => return Err(CliError::Spec(format!("unknown LP mode `{other}`"))),
    };
    let loaded = load_instance(spec)?;
    let optg = |opt: Option<f64>| -> CliResult<Option<f64>> {
        Ok(match (mode, opt) {
            (IlpMode::Bsm, None) => Some(match &loaded.instance {
                Instance::Coverage(x) => brute_force(x, spec.k, spec.tau)?.opt_g,
                Instance::Facility(x) => brute_force(x, spec.k, spec.tau)?.opt_g,
                Instance::Influence { .. } => unreachable!(),
            }),
            (_, v) => v,
        })
    };
    let text = match &loaded.instance {
        Instance::Coverage(x) => export_ilp_mc(x, spec.k, spec.tau, optg(args.opt_g)?, mode)?,
        Instance::Facility(x) => export_ilp_fl(x, spec.k, spec.tau, optg(args.opt_g)?, mode)?,
        Instance::Influence { .. } => {
            return Err(CliError::Spec("LP export supports mc and fl only".into()))
        }
    };
    std::fs::write(path, text).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))
}

fn run(args: &Args) -> Result<ExitCode, (u8, CliError)> {
    let spec = build_spec(args).map_err(|e| (1, e))?;
    if let Some(path) = &args.export_lp {
        export_lp(args, &spec, path).map_err(|e| (1, e))?;
        return Ok(ExitCode::SUCCESS);
    }
    let result = if spec.sweep.is_none() {
        let (result, report) = run_single(&spec).map_err(|e| (1, e))?;
        print!("{report}");
        if spec.out.is_some() {
            let out = open_out(spec.out.as_ref()).map_err(|e| (1, e))?;
            write_table(&result, out, spec.format, spec.timing).map_err(|e| (1, e))?;
        }
        result
    } else {
        let result = run_sweep(&spec).map_err(|e| (1, e))?;
        let out = open_out(spec.out.as_ref()).map_err(|e| (1, e))?;
        write_table(&result, out, spec.format, spec.timing).map_err(|e| (1, e))?;
        result
    };
    let failed = result.failures();
    if failed > 0 {
        eprintln!("{failed} of {} rows failed", result.rows.len());
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&args) {
        Ok(code) => code,
        Err((code, e)) => {
            eprintln!("error: {e}");
            ExitCode::from(code)
        }
    }
}
