//! `knapsub`: generate instances, solve them, and run experiment suites.
//!
//! Exit codes: 0 success, 1 run failure or property violation, 2 input
//! error, 3 capacity error.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use knapsub_core::bruteforce::exact_opt;
use knapsub_core::enumeration::h_paper;
use knapsub_core::properties::{check_all, DEFAULT_TOLERANCE};
use knapsub_core::Instance;
use knapsub_harness::format::canonical_json;
use knapsub_harness::generate::{generate, CostModel, Family, GenSpec};
use knapsub_harness::instance_file::parse_instance;
use knapsub_harness::suite::{run_algorithm, run_suite, AlgorithmKind, RunParams, SuiteConfig, DEFAULT_SOLVER};
use serde_json::json;

#[derive(Parser)]
#[command(name = "knapsub", version, about = "Submodular maximization under knapsack constraints")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance file.
    Gen {
        #[command(subcommand)]
        family: GenFamily,
        #[command(flatten)]
        common: GenCommon,
    },
    /// Solve an instance and print the solution as JSON.
    Solve {
        instance: PathBuf,
        #[arg(long, default_value = "randomized", value_parser = parse_algorithm)]
        algorithm: AlgorithmKind,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Compute the exact optimum (n <= 22).
    Opt {
        instance: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a suite config and write the CSV report.
    Suite {
        config: PathBuf,
        /// Report path; the summary goes to `<out>.summary.csv`. Defaults to stdout
        /// with the summary on stderr.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Leave `wall_ms` blank so reports are byte-stable.
        #[arg(long)]
        no_timing: bool,
    },
    /// Check submodularity (and monotonicity, if declared) of an instance's objective.
    Verify {
        instance: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random trials per property.
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
}

#[derive(Subcommand)]
enum GenFamily {
    Coverage {
        #[arg(long)]
        sets: usize,
        #[arg(long)]
        items: usize,
        #[arg(long, default_value_t = 0.3)]
        density: f64,
        #[arg(long, value_parser = parse_range, default_value = "1,1")]
        profit: [f64; 2],
    },
    Cut {
        #[arg(long)]
        vertices: usize,
        #[arg(long, default_value_t = 0.5)]
        edge_prob: f64,
        #[arg(long, value_parser = parse_range, default_value = "1,1")]
        weight: [f64; 2],
        #[arg(long)]
        directed: bool,
    },
    Modular {
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = parse_range, default_value = "0,1")]
        weight: [f64; 2],
    },
}

#[derive(Args)]
struct GenCommon {
    /// Knapsack dimensions.
    #[arg(long, global = true, default_value_t = 1)]
    d: usize,
    /// Cost range `lo,hi` (budgets are 1).
    #[arg(long, global = true, value_parser = parse_range, default_value = "0,0.5")]
    cost: [f64; 2],
    /// Small-element mode: costs uniform in `[0, eps^3]`.
    #[arg(long, global = true)]
    small: Option<f64>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true)]
    name: Option<String>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, default_value_t = knapsub_harness::suite::DEFAULT_EPSILON)]
    epsilon: f64,
    /// Guess size (default `min(ceil(d / eps^4), 3)`).
    #[arg(long)]
    h: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = knapsub_harness::suite::DEFAULT_ATTEMPTS)]
    attempts: usize,
    #[arg(long, default_value = DEFAULT_SOLVER)]
    solver: String,
    /// Sampled gradients with this many samples (continuous-greedy only).
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_range(s: &str) -> Result<[f64; 2], String> {
    let (lo, hi) = s.split_once(',').ok_or("expected lo,hi")?;
    let p = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("{v}: {e}"));
    Ok([p(lo)?, p(hi)?])
}

fn parse_algorithm(s: &str) -> Result<AlgorithmKind, String> {
    AlgorithmKind::parse(s).ok_or_else(|| format!("unknown algorithm '{s}' (randomized, deterministic, bruteforce)"))
}

enum Failure {
    Input(anyhow::Error),
    Capacity(anyhow::Error),
    Run(anyhow::Error),
}

impl Failure {
    fn input(e: impl Into<anyhow::Error>) -> Self {
        Failure::Input(e.into())
    }
}

impl From<knapsub_core::Error> for Failure {
    fn from(e: knapsub_core::Error) -> Self {
        use knapsub_core::Error as E;
        if e.is_capacity() {
            Failure::Capacity(e.into())
        } else if matches!(e, E::InvalidInput(_) | E::Config(_)) {
            Failure::Input(e.into())
        } else {
            Failure::Run(e.into())
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text)
            .with_context(|| format!("writing {}", path.display()))
            .map_err(Failure::Run),
        None => io::stdout().write_all(text.as_bytes()).map_err(|e| Failure::Run(e.into())),
    }
}

fn read_instance(path: &Path) -> Result<Instance, Failure> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(Failure::input)?;
    let (_, inst) = parse_instance(&text)
        .with_context(|| format!("parsing {}", path.display()))
        .map_err(Failure::input)?;
    Ok(inst)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Gen { family, common } => {
            let family = match family {
                GenFamily::Coverage {
                    sets,
                    items,
                    density,
                    profit,
                } => Family::Coverage {
                    sets,
                    items,
                    density,
                    profit,
                },
                GenFamily::Cut {
                    vertices,
                    edge_prob,
                    weight,
                    directed,
                } => Family::Cut {
                    vertices,
                    edge_prob,
                    weight,
                    directed,
                },
                GenFamily::Modular { n, weight } => Family::Modular { n, weight },
            };
            let spec = GenSpec {
                family,
                costs: CostModel {
                    d: common.d,
                    range: common.cost,
                    small_eps: common.small,
                },
            };
            let file = generate(&spec, common.seed, common.name).map_err(|e| Failure::input(anyhow::anyhow!(e)))?;
            emit(common.out.as_deref(), &(file.to_canonical_string() + "\n"))
        }
        Command::Solve {
            instance,
            algorithm,
            run,
        } => {
            let inst = read_instance(&instance)?;
            let params = RunParams {
                algorithm,
                solver: run.solver,
                epsilon: run.epsilon,
                h: run.h,
                attempts: run.attempts,
                samples: run.samples,
            };
            let out = run_algorithm(&inst, &params, run.seed)?;
            let mut doc = json!({
                "algorithm": algorithm.name(),
                "members": out.solution.members(),
                "value": out.solution.value(),
                "cost": out.solution.cost(),
                "feasible": out.solution.is_feasible(&inst),
                "seed": run.seed,
                "epsilon": params.epsilon,
            });
            if algorithm != AlgorithmKind::Bruteforce {
                doc["solver"] = json!(params.solver);
                doc["h_eff"] = json!(params.h_eff(&inst));
                doc["h_paper"] = json!(h_paper(inst.d(), params.epsilon));
            }
            if let Some((before, after)) = out.frac {
                doc["frac_before"] = json!(before);
                doc["frac_after"] = json!(after);
            }
            emit(run.out.as_deref(), &(canonical_json(&doc) + "\n"))
        }
        Command::Opt { instance, out } => {
            let inst = read_instance(&instance)?;
            let r = exact_opt(&inst)?;
            let doc = json!({
                "members": r.set.members(),
                "value": r.value,
                "cost": r.set.cost(),
                "enumerated": r.enumerated,
            });
            emit(out.as_deref(), &(canonical_json(&doc) + "\n"))
        }
        Command::Suite { config, out, no_timing } => {
            let text = fs::read_to_string(&config)
                .with_context(|| format!("reading {}", config.display()))
                .map_err(Failure::input)?;
            let cfg = SuiteConfig::from_json(&text)
                .map_err(|e| Failure::input(anyhow::anyhow!("{}: {e}", config.display())))?;
            let base = config.parent().unwrap_or(Path::new("."));
            let report = run_suite(&cfg, base);
            let mut csv = Vec::new();
            report.write_csv(&mut csv, !no_timing).map_err(|e| Failure::Run(e.into()))?;
            let mut summary = Vec::new();
            report.write_summary_csv(&mut summary).map_err(|e| Failure::Run(e.into()))?;
            match out {
                Some(path) => {
                    emit(Some(&path), &String::from_utf8_lossy(&csv))?;
                    let mut spath = path.into_os_string();
                    spath.push(".summary.csv");
                    emit(Some(Path::new(&spath)), &String::from_utf8_lossy(&summary))
                }
                None => {
                    emit(None, &String::from_utf8_lossy(&csv))?;
                    io::stderr().write_all(&summary).map_err(|e| Failure::Run(e.into()))
                }
            }
        }
        Command::Verify { instance, seed, samples } => {
            let inst = read_instance(&instance)?;
            let reports = check_all(inst.oracle(), samples, seed, DEFAULT_TOLERANCE);
            let mut failed = false;
            for r in &reports {
                let status = if r.passed() { "ok" } else { "FAIL" };
                println!("{status:4} {:24} {} trials, {} violations, worst {:e}", r.name, r.trials, r.violations, r.worst);
                failed |= !r.passed();
            }
            if failed {
                Err(Failure::Run(anyhow::anyhow!("property violations found")))
            } else {
                Ok(())
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Capacity(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
