use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use bsm_core::algorithms::{BudgetMode, DEFAULT_EPS};
use bsm_core::data::SbmConfig;
use bsm_core::problems::{Kernel, DEFAULT_MC_REPS, DEFAULT_PROBABILITY, DEFAULT_RR_SAMPLES};

use crate::error::{spec_err, CliError, CliResult};

pub const DEFAULT_TAU: f64 = 0.8;
pub const DEFAULT_K: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Problem {
    Mc,
    Im,
    Fl,
}

impl FromStr for Problem {
    type Err = CliError;
    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "mc" => Ok(Self::Mc),
            "im" => Ok(Self::Im),
            "fl" => Ok(Self::Fl),
            _ => Err(spec_err(format!("unknown problem `{s}` (expected mc, im or fl)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Algorithm {
    Greedy,
    Saturate,
    TsGreedy,
    BsmSaturate,
    BruteForce,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Self::Greedy => "greedy",
            Self::Saturate => "saturate",
            Self::TsGreedy => "tsgreedy",
            Self::BsmSaturate => "bsm-saturate",
            Self::BruteForce => "brute-force",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = CliError;
    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "greedy" => Ok(Self::Greedy),
            "saturate" => Ok(Self::Saturate),
            "tsgreedy" => Ok(Self::TsGreedy),
            "bsm-saturate" => Ok(Self::BsmSaturate),
            "brute-force" => Ok(Self::BruteForce),
            _ => Err(spec_err(format!(
                "unknown algorithm `{s}` (expected greedy, saturate, tsgreedy, bsm-saturate or brute-force)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Tau,
    K,
    Eps,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            Self::Tau => "tau",
            Self::K => "k",
            Self::Eps => "eps",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
}

impl FromStr for Sweep {
    type Err = CliError;

    /// `axis=start:stop:step` (inclusive) or `axis=v1,v2,...`.
    fn from_str(s: &str) -> CliResult<Self> {
        let (axis, range) = s
            .split_once('=')
            .ok_or_else(|| spec_err(format!("sweep `{s}` must look like tau=0.1:0.9:0.1")))?;
        let axis = match axis.trim() {
            "tau" => SweepAxis::Tau,
            "k" => SweepAxis::K,
            "eps" => SweepAxis::Eps,
            other => return Err(spec_err(format!("unknown sweep axis `{other}`"))),
        };
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| spec_err(format!("bad number `{t}` in sweep `{s}`")))
        };
        let values = if range.contains(':') {
            let parts: Vec<&str> = range.split(':').collect();
            let [a, b, step] = parts.as_slice() else {
                return Err(spec_err(format!("sweep range `{range}` must be start:stop:step")));
            };
            let (a, b, step) = (num(a)?, num(b)?, num(step)?);
            if step.is_nan() || step <= 0.0 || b < a {
                return Err(spec_err(format!("empty or invalid sweep range `{range}`")));
            }
            let count = ((b - a) / step + 1e-9).floor() as usize + 1;
            // Rounded to 12 decimals so that 0.1 * 3 prints as 0.3.
            (0..count)
                .map(|i| ((a + i as f64 * step) * 1e12).round() / 1e12)
                .collect()
        } else {
            range.split(',').map(num).collect::<CliResult<Vec<_>>>()?
        };
        if values.is_empty() {
            return Err(spec_err(format!("sweep `{s}` has no values")));
        }
        Ok(Sweep { axis, values })
    }
}

/// Synthetic instance generators selectable with `--gen`.
#[derive(Debug, Clone, PartialEq)]
pub enum Generator {
    Sbm {
        n: usize,
        proportions: Vec<f64>,
        p_intra: f64,
        p_inter: f64,
        directed: bool,
    },
    Blobs {
        counts: Vec<usize>,
        dim: usize,
        sigma: f64,
        half_width: f64,
    },
    Hard {
        k: usize,
        alpha: f64,
        m: usize,
    },
}

impl Generator {
    pub fn sbm_config(&self, seed: u64) -> Option<SbmConfig> {
        match self {
            Self::Sbm {
                n,
                proportions,
                p_intra,
                p_inter,
                directed,
            } => Some(
                SbmConfig::new(*n, proportions.clone(), *p_intra, *p_inter)
                    .directed(*directed)
                    .seed(seed),
            ),
            _ => None,
        }
    }
}

fn key_values(body: &str, allowed: &[&str]) -> CliResult<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for part in body.split(',').filter(|p| !p.trim().is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| spec_err(format!("generator option `{part}` must be key=value")))?;
        let k = k.trim();
        if !allowed.contains(&k) {
            return Err(spec_err(format!(
                "unknown generator option `{k}` (expected one of {})",
                allowed.join(", ")
            )));
        }
        map.insert(k.to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn get<T: FromStr>(map: &BTreeMap<String, String>, key: &str, default: Option<T>) -> CliResult<T> {
    match map.get(key) {
        Some(v) => v
            .parse()
            .map_err(|_| spec_err(format!("bad value `{v}` for generator option `{key}`"))),
        None => default.ok_or_else(|| spec_err(format!("generator option `{key}` is required"))),
    }
}

fn list<T: FromStr>(map: &BTreeMap<String, String>, key: &str, default: &str) -> CliResult<Vec<T>> {
    let raw = map.get(key).map_or(default, String::as_str);
    raw.split('/')
        .map(|v| {
            v.trim()
                .parse()
                .map_err(|_| spec_err(format!("bad value `{v}` in generator option `{key}`")))
        })
        .collect()
}

impl FromStr for Generator {
    type Err = CliError;

    /// `sbm:n=500,props=0.2/0.8,pin=0.1,pout=0.02,directed=false`,
    /// `blobs:counts=15/85,dim=5,sigma=1,width=10`, or
    /// `hard:k=1,alpha=0.1,m=10`.
    fn from_str(s: &str) -> CliResult<Self> {
        let (kind, body) = s.split_once(':').unwrap_or((s, ""));
        match kind {
            "sbm" => {
                let kv = key_values(body, &["n", "props", "pin", "pout", "directed"])?;
                Ok(Self::Sbm {
                    n: get(&kv, "n", Some(500))?,
                    proportions: list(&kv, "props", "0.2/0.8")?,
                    p_intra: get(&kv, "pin", Some(0.1))?,
                    p_inter: get(&kv, "pout", Some(0.02))?,
                    directed: get(&kv, "directed", Some(false))?,
                })
            }
            "blobs" => {
                let kv = key_values(body, &["counts", "dim", "sigma", "width"])?;
                Ok(Self::Blobs {
                    counts: list(&kv, "counts", "50/50")?,
                    dim: get(&kv, "dim", Some(5))?,
                    sigma: get(&kv, "sigma", Some(1.0))?,
                    half_width: get(&kv, "width", Some(10.0))?,
                })
            }
            "hard" => {
                let kv = key_values(body, &["k", "alpha", "m"])?;
                Ok(Self::Hard {
                    k: get(&kv, "k", Some(1))?,
                    alpha: get(&kv, "alpha", Some(0.1))?,
                    m: get(&kv, "m", Some(10))?,
                })
            }
            _ => Err(spec_err(format!(
                "unknown generator `{kind}` (expected sbm, blobs or hard)"
            ))),
        }
    }
}

/// Parses `rbf`, `kmedian`, or `kmedian:dbar=<d>`.
pub fn parse_kernel(s: &str) -> CliResult<Kernel> {
    match s {
        "rbf" => Ok(Kernel::Rbf),
        "kmedian" => Ok(Kernel::KMedian { dbar: None }),
        _ => {
            let dbar = s
                .strip_prefix("kmedian:dbar=")
                .and_then(|d| d.parse::<f64>().ok())
                .ok_or_else(|| spec_err(format!("unknown kernel `{s}` (expected rbf, kmedian or kmedian:dbar=<d>)")))?;
            Ok(Kernel::KMedian { dbar: Some(dbar) })
        }
    }
}

/// Where the instance comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Graph {
        graph: PathBuf,
        groups: PathBuf,
        directed: bool,
    },
    Sets {
        sets: PathBuf,
        groups: PathBuf,
    },
    Points {
        points: PathBuf,
    },
    Generated(Generator),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = CliError;
    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" | "jsonl" => Ok(Self::Json),
            _ => Err(spec_err(format!("unknown format `{s}` (expected csv or json)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub problem: Problem,
    pub source: Source,
    pub algorithms: Vec<Algorithm>,
    pub sweep: Option<Sweep>,
    pub k: usize,
    pub tau: f64,
    pub eps: f64,
    pub budget_mode: BudgetMode,
    pub p: f64,
    pub rr_samples: usize,
    pub mc_reps: usize,
    pub seed: u64,
    pub kernel: Kernel,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub threads: Option<usize>,
    /// When false the wall-clock column is left empty, making output
    /// byte-identical across runs.
    pub timing: bool,
}

impl ExperimentSpec {
    pub fn new(problem: Problem, source: Source) -> Self {
        Self {
            problem,
            source,
            algorithms: vec![Algorithm::TsGreedy, Algorithm::BsmSaturate],
            sweep: None,
            k: DEFAULT_K,
            tau: DEFAULT_TAU,
            eps: DEFAULT_EPS,
            budget_mode: BudgetMode::ExactK,
            p: DEFAULT_PROBABILITY,
            rr_samples: DEFAULT_RR_SAMPLES,
            mc_reps: DEFAULT_MC_REPS,
            seed: 0,
            kernel: Kernel::Rbf,
            out: None,
            format: Format::Csv,
            threads: None,
            timing: true,
        }
    }

    /// One `(k, tau, eps)` triple per sweep value, or the fixed values.
    pub fn points(&self) -> Vec<SweepPoint> {
        let fixed = SweepPoint {
            value: None,
            k: self.k,
            tau: self.tau,
            eps: self.eps,
        };
        match &self.sweep {
            None => vec![fixed],
            Some(sweep) => sweep
                .values
                .iter()
                .map(|&v| {
                    let mut p = fixed;
                    p.value = Some(v);
                    match sweep.axis {
                        SweepAxis::Tau => p.tau = v,
                        SweepAxis::K => p.k = v.round() as usize,
                        SweepAxis::Eps => p.eps = v,
                    }
                    p
                })
                .collect(),
        }
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.algorithms.is_empty() {
            return Err(spec_err("no algorithm selected"));
        }
        if let Some(sweep) = &self.sweep {
            for &v in &sweep.values {
                let ok = match sweep.axis {
                    SweepAxis::Tau => (0.0..=1.0).contains(&v),
                    SweepAxis::Eps => v > 0.0 && v < 1.0,
                    SweepAxis::K => v >= 1.0 && v.fract() == 0.0,
                };
                if !ok {
                    return Err(spec_err(format!(
                        "sweep value {v} is invalid for axis {}",
                        sweep.axis.name()
                    )));
                }
            }
        }
        for point in self.points() {
            if point.k == 0 {
                return Err(spec_err("k must be >= 1"));
            }
            if !(0.0..=1.0).contains(&point.tau) {
                return Err(spec_err(format!("tau = {} outside [0, 1]", point.tau)));
            }
            if !(point.eps > 0.0 && point.eps < 1.0) {
                return Err(spec_err(format!("eps = {} outside (0, 1)", point.eps)));
            }
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(spec_err(format!("p = {} outside [0, 1]", self.p)));
        }
        if self.rr_samples == 0 || self.mc_reps == 0 {
            return Err(spec_err("--rr and --reps must be >= 1"));
        }
        if self.threads == Some(0) {
            return Err(spec_err("--threads must be >= 1"));
        }
        if self.problem == Problem::Im && self.algorithms.contains(&Algorithm::BruteForce) {
            return Err(spec_err(
                "brute-force is not available for influence maximization (spread is only estimated)",
            ));
        }
        let compatible = matches!(
            (&self.problem, &self.source),
            (Problem::Mc, Source::Graph { .. } | Source::Sets { .. })
                | (Problem::Im, Source::Graph { .. })
                | (Problem::Mc | Problem::Im, Source::Generated(Generator::Sbm { .. }))
                | (Problem::Fl, Source::Points { .. })
                | (Problem::Fl, Source::Generated(Generator::Blobs { .. } | Generator::Hard { .. }))
        );
        if !compatible {
            let source = match &self.source {
                Source::Graph { .. } => "--graph",
                Source::Sets { .. } => "--sets",
                Source::Points { .. } => "--points",
                Source::Generated(Generator::Sbm { .. }) => "the sbm generator",
                Source::Generated(Generator::Blobs { .. }) => "the blobs generator",
                Source::Generated(Generator::Hard { .. }) => "the hard generator",
            };
            let problem = match self.problem {
                Problem::Mc => "mc",
                Problem::Im => "im",
                Problem::Fl => "fl",
            };
            return Err(spec_err(format!("{source} cannot be used with --problem {problem}")));
        }
        Ok(())
    }
}

/// Parameters of one sweep point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub value: Option<f64>,
    pub k: usize,
    pub tau: f64,
    pub eps: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_ranges() {
        let s: Sweep = "tau=0.1:0.9:0.1".parse().unwrap();
        assert_eq!(s.values.len(), 9);
        assert_eq!(s.values[2], 0.3);
        assert_eq!(s.values[8], 0.9);
        let s: Sweep = "k=5:50:5".parse().unwrap();
        assert_eq!(s.values.len(), 10);
        let s: Sweep = "eps=0.05,0.1".parse().unwrap();
        assert_eq!((s.axis, s.values), (SweepAxis::Eps, vec![0.05, 0.1]));
        assert!("tau=0.9:0.1:0.1".parse::<Sweep>().is_err());
        assert!("rho=1".parse::<Sweep>().is_err());
    }

    #[test]
    fn generators() {
        let g: Generator = "sbm:n=100,props=0.5/0.5,directed=true".parse().unwrap();
        assert_eq!(
            g,
            Generator::Sbm {
                n: 100,
                proportions: vec![0.5, 0.5],
                p_intra: 0.1,
                p_inter: 0.02,
                directed: true
            }
        );
        let g: Generator = "hard:k=2,alpha=0.2,m=6".parse().unwrap();
        assert_eq!(g, Generator::Hard { k: 2, alpha: 0.2, m: 6 });
        assert!("sbm:q=1".parse::<Generator>().is_err());
        assert!("grid".parse::<Generator>().is_err());
    }

    #[test]
    fn kernels() {
        assert_eq!(parse_kernel("rbf").unwrap(), Kernel::Rbf);
        assert_eq!(
            parse_kernel("kmedian:dbar=2.5").unwrap(),
            Kernel::KMedian { dbar: Some(2.5) }
        );
        assert!(parse_kernel("linear").is_err());
    }
}
