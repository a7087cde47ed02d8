//! Randomized checks of the inequalities the analysis relies on.
//!
//! Each checker draws random sets from a seeded stream, evaluates the
//! inequality with an additive tolerance, and reports how often and by how
//! much it failed.

use rand::Rng;

use crate::oracle::SubmodularOracle;
use crate::seed::{rng_from_seed, SeededRng};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyReport {
    pub name: &'static str,
    pub trials: usize,
    pub violations: usize,
    /// Largest amount by which the inequality failed (0 if it never did).
    pub worst: f64,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

struct Tally {
    report: PropertyReport,
    tol: f64,
}

impl Tally {
    fn new(name: &'static str, trials: usize, tol: f64) -> Self {
        Self {
            report: PropertyReport {
                name,
                trials,
                violations: 0,
                worst: 0.0,
            },
            tol,
        }
    }

    /// Records `lhs <= rhs` up to the tolerance.
    fn le(&mut self, lhs: f64, rhs: f64) {
        let gap = lhs - rhs;
        if gap > self.tol {
            self.report.violations += 1;
            self.report.worst = self.report.worst.max(gap);
        }
    }
}

fn random_mask(rng: &mut SeededRng, n: usize) -> Vec<bool> {
    let p: f64 = rng.gen();
    (0..n).map(|_| rng.gen::<f64>() < p).collect()
}

/// Assigns every member of `mask` to one of `k` parts.
fn random_partition(rng: &mut SeededRng, mask: &[bool], k: usize) -> Vec<Vec<bool>> {
    let mut parts = vec![vec![false; mask.len()]; k];
    for (i, _) in mask.iter().enumerate().filter(|(_, &m)| m) {
        parts[rng.gen_range(0..k)][i] = true;
    }
    parts
}

fn union(a: &[bool], b: &[bool]) -> Vec<bool> {
    a.iter().zip(b).map(|(x, y)| *x || *y).collect()
}

fn minus(a: &[bool], b: &[bool]) -> Vec<bool> {
    a.iter().zip(b).map(|(x, y)| *x && !*y).collect()
}

/// `f(S) + f(T) >= f(S ∪ T) + f(S ∩ T)`.
pub fn check_submodularity(f: &SubmodularOracle, trials: usize, seed: u64, tol: f64) -> PropertyReport {
    let mut rng = rng_from_seed(seed);
    let mut t = Tally::new("submodularity", trials, tol);
    for _ in 0..trials {
        let a = random_mask(&mut rng, f.n());
        let b = random_mask(&mut rng, f.n());
        let inter: Vec<bool> = a.iter().zip(&b).map(|(x, y)| *x && *y).collect();
        t.le(
            f.eval_mask(&union(&a, &b)) + f.eval_mask(&inter),
            f.eval_mask(&a) + f.eval_mask(&b),
        );
    }
    t.report
}

/// `f(S) <= f(T)` for `S ⊆ T`.
pub fn check_monotonicity(f: &SubmodularOracle, trials: usize, seed: u64, tol: f64) -> PropertyReport {
    let mut rng = rng_from_seed(seed);
    let mut t = Tally::new("monotonicity", trials, tol);
    for _ in 0..trials {
        let big = random_mask(&mut rng, f.n());
        let small = minus(&big, &random_mask(&mut rng, f.n()));
        t.le(f.eval_mask(&small), f.eval_mask(&big));
    }
    t.report
}

/// Subadditivity over a partition: `f(S) <= Σ f(S_i)`, valid when `f(∅) >= 0`.
pub fn check_partition_subadditivity(f: &SubmodularOracle, trials: usize, seed: u64, tol: f64) -> PropertyReport {
    let mut rng = rng_from_seed(seed);
    let mut t = Tally::new("partition subadditivity", trials, tol);
    for _ in 0..trials {
        let s = random_mask(&mut rng, f.n());
        let k = rng.gen_range(1..=5);
        let parts = random_partition(&mut rng, &s, k);
        t.le(f.eval_mask(&s), parts.iter().map(|p| f.eval_mask(p)).sum());
    }
    t.report
}

/// Diminishing marginals: `f_{T2}(S) <= f_{T1}(S)` for `T1 ⊆ T2`, `S ∩ T2 = ∅`.
pub fn check_diminishing_marginals(f: &SubmodularOracle, trials: usize, seed: u64, tol: f64) -> PropertyReport {
    let mut rng = rng_from_seed(seed);
    let mut t = Tally::new("diminishing marginals", trials, tol);
    for _ in 0..trials {
        let t2 = random_mask(&mut rng, f.n());
        let t1 = minus(&t2, &random_mask(&mut rng, f.n()));
        let s = minus(&random_mask(&mut rng, f.n()), &t2);
        let gain = |base: &[bool]| f.eval_mask(&union(base, &s)) - f.eval_mask(base);
        t.le(gain(&t2), gain(&t1));
    }
    t.report
}

/// `f(S) >= Σ f_{S \ S_i}(S_i)` over a partition of `S`, valid when `f(∅) >= 0`.
pub fn check_partition_marginals(f: &SubmodularOracle, trials: usize, seed: u64, tol: f64) -> PropertyReport {
    let mut rng = rng_from_seed(seed);
    let mut t = Tally::new("partition marginals", trials, tol);
    for _ in 0..trials {
        let s = random_mask(&mut rng, f.n());
        let k = rng.gen_range(1..=5);
        let parts = random_partition(&mut rng, &s, k);
        let whole = f.eval_mask(&s);
        let sum: f64 = parts.iter().map(|p| whole - f.eval_mask(&minus(&s, p))).sum();
        t.le(sum, whole);
    }
    t.report
}

/// Runs every check; monotonicity only for oracles declared monotone.
pub fn check_all(f: &SubmodularOracle, trials: usize, seed: u64, tol: f64) -> Vec<PropertyReport> {
    let mut out = vec![
        check_submodularity(f, trials, seed, tol),
        check_partition_subadditivity(f, trials, seed.wrapping_add(1), tol),
        check_diminishing_marginals(f, trials, seed.wrapping_add(2), tol),
        check_partition_marginals(f, trials, seed.wrapping_add(3), tol),
    ];
    if f.is_monotone() {
        out.push(check_monotonicity(f, trials, seed.wrapping_add(4), tol));
    }
    out
}
