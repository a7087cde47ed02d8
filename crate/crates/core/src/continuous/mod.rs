//! Solvers for the continuous relaxation `max F(y)` over the knapsack
//! polytope `P = { y in [0,1]^n : Σ_i y_i c(i) <= L }`.
//!
//! Any routine mapping `(Instance, seed)` to a point of `P` can be plugged in
//! through [`ContinuousSolver`] and looked up by name in a [`SolverRegistry`].

mod greedy;
mod grid;
pub mod lp;
mod local_search;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

pub use greedy::continuous_greedy;
pub use grid::grid_bruteforce;
pub use local_search::local_search_fractional;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::multilinear::FractionalPoint;

pub const DEFAULT_STEPS: usize = 100;
pub const DEFAULT_SAMPLES_PER_GRADIENT: usize = 1000;
pub const DEFAULT_RESTARTS: usize = 4;
pub const DEFAULT_GRID_RESOLUTION: u32 = 4;

/// Local search stops once no move improves `F` by more than this.
pub const LOCAL_SEARCH_MIN_GAIN: f64 = 1e-9;

/// The knapsack polytope of an instance.
#[derive(Debug, Clone, Copy)]
pub struct Polytope<'a> {
    inst: &'a Instance,
}

impl<'a> Polytope<'a> {
    pub fn new(inst: &'a Instance) -> Self {
        Self { inst }
    }

    /// Inclusive membership test in every dimension, no slack.
    pub fn contains(&self, y: &FractionalPoint) -> bool {
        y.len() == self.inst.n()
            && self
                .inst
                .cost_of_point(y)
                .iter()
                .zip(self.inst.budget())
                .all(|(c, l)| c <= l)
    }
}

pub fn contains(inst: &Instance, y: &FractionalPoint) -> bool {
    Polytope::new(inst).contains(y)
}

/// Which continuous algorithm to run and with what effort.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ContinuousMethod {
    /// Frank-Wolfe style ascent for monotone objectives. With
    /// `exact_marginals` the gradient comes from the exact extension;
    /// otherwise each step samples `samples_per_gradient` sets.
    ContinuousGreedy {
        steps: usize,
        samples_per_gradient: usize,
        exact_marginals: bool,
    },
    /// Steepest ascent on the grid `{0, 1/m, ..., 1}^n`, best of `restarts` starts.
    LocalSearch { resolution: u32, restarts: usize },
    /// Exhaustive scan of the grid `{0, 1/m, ..., 1}^n`.
    GridBruteForce { resolution: u32 },
}

impl ContinuousMethod {
    pub fn validate(&self) -> Result<()> {
        let grid_ok = |m: u32| {
            if (2..=16).contains(&m) {
                Ok(())
            } else {
                Err(Error::Config(format!("grid resolution 1/{m} must be between 1/2 and 1/16")))
            }
        };
        match *self {
            ContinuousMethod::ContinuousGreedy {
                steps,
                samples_per_gradient,
                exact_marginals,
            } => {
                if steps == 0 {
                    return Err(Error::Config("continuous greedy needs at least one step".into()));
                }
                if !exact_marginals && samples_per_gradient == 0 {
                    return Err(Error::Config("sampled gradients need at least one sample".into()));
                }
                Ok(())
            }
            ContinuousMethod::LocalSearch { resolution, restarts } => {
                if restarts == 0 {
                    return Err(Error::Config("local search needs at least one start".into()));
                }
                grid_ok(resolution)
            }
            ContinuousMethod::GridBruteForce { resolution } => grid_ok(resolution),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuousSolverConfig {
    pub method: ContinuousMethod,
    pub seed: u64,
}

/// Runs the configured method on `inst`.
pub fn solve_continuous(inst: &Instance, cfg: &ContinuousSolverConfig) -> Result<FractionalPoint> {
    cfg.method.validate()?;
    match cfg.method {
        ContinuousMethod::ContinuousGreedy {
            steps,
            samples_per_gradient,
            exact_marginals,
        } => continuous_greedy(inst, steps, samples_per_gradient, exact_marginals, cfg.seed),
        ContinuousMethod::LocalSearch { resolution, restarts } => {
            local_search_fractional(inst, resolution, restarts, cfg.seed)
        }
        ContinuousMethod::GridBruteForce { resolution } => grid_bruteforce(inst, resolution),
    }
}

/// A continuous relaxation solver usable by the rounding pipelines.
///
/// Implementations must return a point of the instance's polytope.
pub trait ContinuousSolver: Send + Sync {
    fn name(&self) -> &str;
    fn solve(&self, inst: &Instance, seed: u64) -> Result<FractionalPoint>;
}

/// A built-in method registered under a name.
#[derive(Debug, Clone)]
pub struct MethodSolver {
    name: String,
    method: ContinuousMethod,
}

impl MethodSolver {
    pub fn new(name: impl Into<String>, method: ContinuousMethod) -> Result<Self> {
        method.validate()?;
        Ok(Self {
            name: name.into(),
            method,
        })
    }

    pub fn method(&self) -> ContinuousMethod {
        self.method
    }
}

impl ContinuousSolver for MethodSolver {
    fn name(&self) -> &str {
        &self.name
    }

    fn solve(&self, inst: &Instance, seed: u64) -> Result<FractionalPoint> {
        solve_continuous(
            inst,
            &ContinuousSolverConfig {
                method: self.method,
                seed,
            },
        )
    }
}

/// Name-indexed collection of continuous solvers.
#[derive(Clone, Default)]
pub struct SolverRegistry {
    solvers: BTreeMap<String, Arc<dyn ContinuousSolver>>,
}

impl fmt::Debug for SolverRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.solvers.keys()).finish()
    }
}

impl SolverRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// `continuous-greedy`, `local-search` and `grid` with default effort.
    pub fn with_defaults() -> Self {
        let mut reg = Self::new();
        let builtin = [
            (
                "continuous-greedy",
                ContinuousMethod::ContinuousGreedy {
                    steps: DEFAULT_STEPS,
                    samples_per_gradient: DEFAULT_SAMPLES_PER_GRADIENT,
                    exact_marginals: true,
                },
            ),
            (
                "local-search",
                ContinuousMethod::LocalSearch {
                    resolution: DEFAULT_GRID_RESOLUTION,
                    restarts: DEFAULT_RESTARTS,
                },
            ),
            (
                "grid",
                ContinuousMethod::GridBruteForce {
                    resolution: DEFAULT_GRID_RESOLUTION,
                },
            ),
        ];
        for (name, method) in builtin {
            reg.register(Arc::new(MethodSolver::new(name, method).expect("valid defaults")));
        }
        reg
    }

    /// Adds or replaces a solver under its own name.
    pub fn register(&mut self, solver: Arc<dyn ContinuousSolver>) {
        self.solvers.insert(solver.name().to_string(), solver);
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn ContinuousSolver>> {
        self.solvers.get(name).cloned().ok_or_else(|| {
            Error::Config(format!(
                "unknown continuous solver '{name}' (known: {})",
                self.names().join(", ")
            ))
        })
    }

    pub fn names(&self) -> Vec<String> {
        self.solvers.keys().cloned().collect()
    }
}

/// Clamps entries into `[0, 1]`, zeroes elements that a zero budget forbids,
/// and shrinks the point until it passes the exact membership test.
pub(crate) fn fit_into_polytope(inst: &Instance, entries: Vec<f64>) -> Result<FractionalPoint> {
    let mut y: Vec<f64> = entries.into_iter().map(|v| v.clamp(0.0, 1.0)).collect();
    for (r, &l) in inst.budget().iter().enumerate() {
        if l <= 0.0 {
            for (i, v) in y.iter_mut().enumerate() {
                if inst.cost(r, i) > 0.0 {
                    *v = 0.0;
                }
            }
        }
    }
    let mut point = FractionalPoint::new(y)?;
    // Must exceed the integrality tolerance or snapping undoes the shrink.
    let mut slack = 4e-12;
    for _ in 0..48 {
        if contains(inst, &point) {
            return Ok(point);
        }
        let ratio = inst
            .cost_of_point(&point)
            .iter()
            .zip(inst.budget())
            .filter(|(c, _)| **c > 0.0)
            .map(|(c, l)| l / c)
            .fold(1.0f64, f64::min);
        let factor = ratio * (1.0 - slack);
        point = FractionalPoint::new(point.entries().iter().map(|v| v * factor).collect())?;
        slack *= 2.0;
    }
    Ok(FractionalPoint::zeros(inst.n()))
}
