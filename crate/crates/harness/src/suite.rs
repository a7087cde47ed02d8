//! The experiment runner.
//!
//! A suite config names instances, algorithms and seeds; the runner solves
//! every combination and reports one CSV row per (instance, algorithm, seed)
//! in config order. Columns, in order:
//!
//! | column | meaning |
//! |---|---|
//! | `instance` | metadata name, file stem, or `instance<k>` |
//! | `algorithm` | `randomized`, `deterministic` or `bruteforce` |
//! | `solver` | continuous solver name (empty for `bruteforce`) |
//! | `epsilon` | accuracy parameter |
//! | `h_eff`, `h_paper` | guess size used, and `ceil(d / eps^4)` |
//! | `seed` | run seed |
//! | `attempts` | sampling attempts (`randomized` only) |
//! | `value` | `f` of the returned set |
//! | `opt` | exact optimum when `n <= 22` and `opt` is enabled |
//! | `ratio` | `value / opt` (1 when both are 0); present iff `opt` is |
//! | `feasible` | `true` when the set fits every budget |
//! | `frac_before`, `frac_after` | fractional entries around pipage reduction (`deterministic` only) |
//! | `wall_ms` | wall time, blank with `--no-timing` |
//! | `error` | error message; the suite continues past failures |
//!
//! Floats are written as `%.17g`.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use knapsub_core::bruteforce::{exact_opt, EXACT_OPT_MAX_N};
use knapsub_core::continuous::{MethodSolver, DEFAULT_STEPS};
use knapsub_core::derandomize::solve_deterministic;
use knapsub_core::enumeration::{default_h, h_paper, solve_randomized};
use knapsub_core::{ContinuousMethod, ContinuousSolver, Instance, SolutionSet, SolverRegistry};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::format::g17;
use crate::generate::{generate, GenSpec};
use crate::instance_file::parse_instance;

pub const COLUMNS: [&str; 16] = [
    "instance",
    "algorithm",
    "solver",
    "epsilon",
    "h_eff",
    "h_paper",
    "seed",
    "attempts",
    "value",
    "opt",
    "ratio",
    "feasible",
    "frac_before",
    "frac_after",
    "wall_ms",
    "error",
];

pub const SUMMARY_COLUMNS: [&str; 7] = ["algorithm", "solver", "rows", "errors", "with_opt", "mean_ratio", "min_ratio"];

pub const DEFAULT_EPSILON: f64 = 0.3;
pub const DEFAULT_ATTEMPTS: usize = knapsub_core::rounding::DEFAULT_ATTEMPTS;
pub const DEFAULT_SOLVER: &str = "continuous-greedy";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgorithmKind {
    Randomized,
    Deterministic,
    Bruteforce,
}

impl AlgorithmKind {
    pub fn name(self) -> &'static str {
        match self {
            AlgorithmKind::Randomized => "randomized",
            AlgorithmKind::Deterministic => "deterministic",
            AlgorithmKind::Bruteforce => "bruteforce",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "randomized" => Some(Self::Randomized),
            "deterministic" => Some(Self::Deterministic),
            "bruteforce" => Some(Self::Bruteforce),
            _ => None,
        }
    }
}

/// Where an instance comes from. Paths are relative to the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum InstanceSource {
    File(PathBuf),
    Generated {
        spec: GenSpec,
        seed: u64,
        #[serde(default)]
        name: Option<String>,
    },
}

/// An algorithm with optional per-algorithm overrides of the suite defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlgorithmEntry {
    Name(AlgorithmKind),
    Spec(AlgorithmSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmSpec {
    pub algorithm: AlgorithmKind,
    #[serde(default)]
    pub solver: Option<String>,
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub h: Option<usize>,
    #[serde(default)]
    pub attempts: Option<usize>,
    #[serde(default)]
    pub samples: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    #[serde(default)]
    pub instances: Vec<InstanceSource>,
    #[serde(default)]
    pub algorithms: Vec<AlgorithmEntry>,
    #[serde(default = "SuiteConfig::default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default = "SuiteConfig::default_epsilon")]
    pub epsilon: f64,
    /// Guess size; `min(ceil(d / eps^4), 3)` when absent.
    #[serde(default)]
    pub h: Option<usize>,
    #[serde(default = "SuiteConfig::default_attempts")]
    pub attempts: usize,
    #[serde(default = "SuiteConfig::default_solver")]
    pub solver: String,
    /// Sampled gradients for `continuous-greedy` with this many samples.
    #[serde(default)]
    pub samples: Option<usize>,
    /// Compute the exact optimum for instances with `n <= 22`.
    #[serde(default = "SuiteConfig::default_opt")]
    pub opt: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields default")
    }
}

impl SuiteConfig {
    fn default_seeds() -> Vec<u64> {
        vec![0]
    }
    fn default_epsilon() -> f64 {
        DEFAULT_EPSILON
    }
    fn default_attempts() -> usize {
        DEFAULT_ATTEMPTS
    }
    fn default_solver() -> String {
        DEFAULT_SOLVER.into()
    }
    fn default_opt() -> bool {
        true
    }

    pub fn from_json(text: &str) -> Result<Self, String> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            if path == "." {
                e.inner().to_string()
            } else {
                format!("{path}: {}", e.inner())
            }
        })
    }

    /// Resolves every algorithm entry against the suite defaults.
    pub fn resolved_algorithms(&self) -> Vec<RunParams> {
        self.algorithms
            .iter()
            .map(|entry| {
                let spec = match entry {
                    AlgorithmEntry::Name(kind) => AlgorithmSpec {
                        algorithm: *kind,
                        solver: None,
                        epsilon: None,
                        h: None,
                        attempts: None,
                        samples: None,
                    },
                    AlgorithmEntry::Spec(s) => s.clone(),
                };
                RunParams {
                    algorithm: spec.algorithm,
                    solver: spec.solver.unwrap_or_else(|| self.solver.clone()),
                    epsilon: spec.epsilon.unwrap_or(self.epsilon),
                    h: spec.h.or(self.h),
                    attempts: spec.attempts.unwrap_or(self.attempts),
                    samples: spec.samples.or(self.samples),
                }
            })
            .collect()
    }
}

/// Everything needed to run one algorithm on one instance, minus the seed.
#[derive(Debug, Clone, PartialEq)]
pub struct RunParams {
    pub algorithm: AlgorithmKind,
    pub solver: String,
    pub epsilon: f64,
    pub h: Option<usize>,
    pub attempts: usize,
    pub samples: Option<usize>,
}

impl RunParams {
    pub fn new(algorithm: AlgorithmKind) -> Self {
        Self {
            algorithm,
            solver: DEFAULT_SOLVER.into(),
            epsilon: DEFAULT_EPSILON,
            h: None,
            attempts: DEFAULT_ATTEMPTS,
            samples: None,
        }
    }

    pub fn h_eff(&self, inst: &Instance) -> usize {
        self.h.unwrap_or_else(|| default_h(inst.d(), self.epsilon))
    }
}

/// Looks up a continuous solver by name. `samples` switches
/// `continuous-greedy` to sampled gradients.
pub fn make_solver(name: &str, samples: Option<usize>) -> knapsub_core::Result<Arc<dyn ContinuousSolver>> {
    if let (DEFAULT_SOLVER, Some(s)) = (name, samples) {
        let method = ContinuousMethod::ContinuousGreedy {
            steps: DEFAULT_STEPS,
            samples_per_gradient: s,
            exact_marginals: false,
        };
        return Ok(Arc::new(MethodSolver::new(name, method)?));
    }
    SolverRegistry::with_defaults().get(name)
}

/// The output of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub solution: SolutionSet,
    pub frac: Option<(usize, usize)>,
}

/// Runs one algorithm on one instance.
pub fn run_algorithm(inst: &Instance, params: &RunParams, seed: u64) -> knapsub_core::Result<RunResult> {
    let h = params.h_eff(inst);
    match params.algorithm {
        AlgorithmKind::Bruteforce => Ok(RunResult {
            solution: exact_opt(inst)?.set,
            frac: None,
        }),
        AlgorithmKind::Randomized => {
            let solver = make_solver(&params.solver, params.samples)?;
            let out = solve_randomized(inst, solver.as_ref(), params.epsilon, h, seed, params.attempts)?;
            Ok(RunResult {
                solution: out.solution,
                frac: None,
            })
        }
        AlgorithmKind::Deterministic => {
            let solver = make_solver(&params.solver, params.samples)?;
            let out = solve_deterministic(inst, solver.as_ref(), params.epsilon, h, seed)?;
            Ok(RunResult {
                solution: out.solution,
                frac: out.frac_before.zip(out.frac_after),
            })
        }
    }
}

/// One report row.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub instance: String,
    pub algorithm: AlgorithmKind,
    pub solver: Option<String>,
    pub epsilon: f64,
    pub h_eff: Option<usize>,
    pub h_paper: Option<u64>,
    pub seed: u64,
    pub attempts: Option<usize>,
    pub value: Option<f64>,
    pub opt: Option<f64>,
    pub ratio: Option<f64>,
    pub feasible: Option<bool>,
    pub frac_before: Option<usize>,
    pub frac_after: Option<usize>,
    pub wall_ms: f64,
    pub error: Option<String>,
}

impl RunRecord {
    pub fn csv_fields(&self, timing: bool) -> [String; 16] {
        fn opt<T: ToString>(v: &Option<T>) -> String {
            v.as_ref().map(T::to_string).unwrap_or_default()
        }
        let float = |v: Option<f64>| v.map(g17).unwrap_or_default();
        [
            self.instance.clone(),
            self.algorithm.name().to_string(),
            opt(&self.solver),
            g17(self.epsilon),
            opt(&self.h_eff),
            opt(&self.h_paper),
            self.seed.to_string(),
            opt(&self.attempts),
            float(self.value),
            float(self.opt),
            float(self.ratio),
            opt(&self.feasible),
            opt(&self.frac_before),
            opt(&self.frac_after),
            if timing { format!("{:.3}", self.wall_ms) } else { String::new() },
            opt(&self.error),
        ]
    }
}

/// Per-(algorithm, solver) aggregate over a report.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub algorithm: AlgorithmKind,
    pub solver: String,
    pub rows: usize,
    pub errors: usize,
    pub with_opt: usize,
    pub mean_ratio: Option<f64>,
    pub min_ratio: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SuiteReport {
    pub rows: Vec<RunRecord>,
}

impl SuiteReport {
    pub fn write_csv<W: Write>(&self, out: W, timing: bool) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(COLUMNS)?;
        for row in &self.rows {
            w.write_record(row.csv_fields(timing))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self, timing: bool) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf, timing).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is utf-8")
    }

    /// Mean and minimum ratio per algorithm and solver, in first-seen order.
    pub fn summary(&self) -> Vec<SummaryRow> {
        let mut order: Vec<(AlgorithmKind, String)> = Vec::new();
        let mut groups: BTreeMap<(AlgorithmKind, String), Vec<&RunRecord>> = BTreeMap::new();
        for row in &self.rows {
            let key = (row.algorithm, row.solver.clone().unwrap_or_default());
            if !groups.contains_key(&key) {
                order.push(key.clone());
            }
            groups.entry(key).or_default().push(row);
        }
        order
            .into_iter()
            .map(|key| {
                let rows = &groups[&key];
                let ratios: Vec<f64> = rows.iter().filter_map(|r| r.ratio).collect();
                SummaryRow {
                    algorithm: key.0,
                    solver: key.1,
                    rows: rows.len(),
                    errors: rows.iter().filter(|r| r.error.is_some()).count(),
                    with_opt: ratios.len(),
                    mean_ratio: (!ratios.is_empty()).then(|| ratios.iter().sum::<f64>() / ratios.len() as f64),
                    min_ratio: ratios.iter().copied().reduce(f64::min),
                }
            })
            .collect()
    }

    pub fn write_summary_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(SUMMARY_COLUMNS)?;
        for s in self.summary() {
            let float = |v: Option<f64>| v.map(g17).unwrap_or_default();
            w.write_record([
                s.algorithm.name().to_string(),
                s.solver,
                s.rows.to_string(),
                s.errors.to_string(),
                s.with_opt.to_string(),
                float(s.mean_ratio),
                float(s.min_ratio),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

struct Loaded {
    name: String,
    instance: Result<Instance, String>,
    opt: Option<f64>,
}

fn load(source: &InstanceSource, index: usize, base_dir: &Path) -> (String, Result<Instance, String>) {
    match source {
        InstanceSource::File(path) => {
            let full = base_dir.join(path);
            let stem = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| format!("instance{index}"));
            match std::fs::read_to_string(&full) {
                Err(e) => (stem, Err(format!("{}: {e}", full.display()))),
                Ok(text) => match parse_instance(&text) {
                    Ok((file, inst)) => (file.name().map(str::to_string).unwrap_or(stem), Ok(inst)),
                    Err(e) => (stem, Err(format!("{}: {e}", full.display()))),
                },
            }
        }
        InstanceSource::Generated { spec, seed, name } => {
            let fallback = name.clone().unwrap_or_else(|| format!("instance{index}"));
            let inst = generate(spec, *seed, name.clone()).and_then(|f| f.to_instance().map_err(|e| e.to_string()));
            (fallback, inst)
        }
    }
}

/// Runs every (instance, algorithm, seed) combination on the rayon pool.
/// Rows come back in config order whatever order they finish in.
pub fn run_suite(cfg: &SuiteConfig, base_dir: &Path) -> SuiteReport {
    let loaded: Vec<Loaded> = cfg
        .instances
        .par_iter()
        .enumerate()
        .map(|(k, src)| {
            let (name, instance) = load(src, k, base_dir);
            let opt = match &instance {
                Ok(inst) if cfg.opt && inst.n() <= EXACT_OPT_MAX_N => exact_opt(inst).ok().map(|r| r.value),
                _ => None,
            };
            Loaded { name, instance, opt }
        })
        .collect();
    let algorithms = cfg.resolved_algorithms();
    let mut jobs = Vec::new();
    for inst in &loaded {
        for params in &algorithms {
            for &seed in &cfg.seeds {
                jobs.push((inst, params, seed));
            }
        }
    }
    let rows = jobs
        .into_par_iter()
        .map(|(loaded, params, seed)| run_row(loaded, params, seed))
        .collect();
    SuiteReport { rows }
}

fn run_row(loaded: &Loaded, params: &RunParams, seed: u64) -> RunRecord {
    let enumerates = params.algorithm != AlgorithmKind::Bruteforce;
    let mut rec = RunRecord {
        instance: loaded.name.clone(),
        algorithm: params.algorithm,
        solver: enumerates.then(|| params.solver.clone()),
        epsilon: params.epsilon,
        h_eff: None,
        h_paper: None,
        seed,
        attempts: (params.algorithm == AlgorithmKind::Randomized).then_some(params.attempts),
        value: None,
        opt: loaded.opt,
        ratio: None,
        feasible: None,
        frac_before: None,
        frac_after: None,
        wall_ms: 0.0,
        error: None,
    };
    let inst = match &loaded.instance {
        Ok(inst) => inst,
        Err(e) => {
            rec.error = Some(e.clone());
            return rec;
        }
    };
    if enumerates {
        rec.h_eff = Some(params.h_eff(inst));
        rec.h_paper = Some(h_paper(inst.d(), params.epsilon));
    }
    let start = Instant::now();
    let result = run_algorithm(inst, params, seed);
    rec.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    match result {
        Ok(out) => {
            let value = out.solution.value();
            rec.value = Some(value);
            rec.feasible = Some(out.solution.is_feasible(inst));
            rec.frac_before = out.frac.map(|f| f.0);
            rec.frac_after = out.frac.map(|f| f.1);
            rec.ratio = rec.opt.map(|opt| if opt == 0.0 { 1.0 } else { value / opt });
        }
        Err(e) => rec.error = Some(e.to_string()),
    }
    rec
}
