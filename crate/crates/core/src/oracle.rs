//! Value oracles for non-negative submodular set functions.
//!
//! Four concrete families are supported: weighted coverage over a bipartite
//! graph, weighted (directed or undirected) graph cuts, modular functions and
//! explicit value tables. All of them are immutable after construction and
//! evaluation is pure.

use rand::Rng;

use crate::error::{Error, Result};
use crate::seed::rng_from_seed;

/// Largest universe an explicit table may describe.
pub const TABLE_MAX_N: usize = 20;

/// Tables up to this size are checked exhaustively at construction; larger
/// ones are checked on random samples.
const TABLE_FULL_CHECK_N: usize = 12;
const TABLE_SAMPLED_CHECKS: usize = 10_000;
const TABLE_CHECK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum OracleKind {
    /// `f(S)` is the total profit of items adjacent to at least one set in `S`.
    Coverage {
        sets: Vec<Vec<usize>>,
        profits: Vec<f64>,
    },
    /// `f(S)` is the weight of edges leaving `S` (directed) or crossing it (undirected).
    Cut {
        n: usize,
        edges: Vec<Edge>,
        directed: bool,
    },
    Modular {
        weights: Vec<f64>,
    },
    /// `values[mask]` is `f` of the set whose bit pattern is `mask`.
    Table {
        n: usize,
        values: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubmodularOracle {
    kind: OracleKind,
    monotone: bool,
}

fn check_non_negative(what: &str, values: &[f64]) -> Result<()> {
    for (i, &v) in values.iter().enumerate() {
        if !v.is_finite() || v < 0.0 {
            return Err(Error::invalid(format!("{what}[{i}] = {v} must be finite and >= 0")));
        }
    }
    Ok(())
}

impl SubmodularOracle {
    pub fn coverage(mut sets: Vec<Vec<usize>>, profits: Vec<f64>) -> Result<Self> {
        check_non_negative("profits", &profits)?;
        for items in &mut sets {
            items.sort_unstable();
            items.dedup();
        }
        for (s, items) in sets.iter().enumerate() {
            if let Some(&bad) = items.iter().find(|&&v| v >= profits.len()) {
                return Err(Error::invalid(format!(
                    "sets[{s}] references item {bad}, only {} items exist",
                    profits.len()
                )));
            }
        }
        Ok(Self {
            kind: OracleKind::Coverage { sets, profits },
            monotone: true,
        })
    }

    pub fn cut(n: usize, edges: Vec<Edge>, directed: bool) -> Result<Self> {
        for (k, e) in edges.iter().enumerate() {
            if e.u >= n || e.v >= n {
                return Err(Error::invalid(format!(
                    "edges[{k}] = ({}, {}) has an endpoint outside 0..{n}",
                    e.u, e.v
                )));
            }
            if !e.weight.is_finite() || e.weight < 0.0 {
                return Err(Error::invalid(format!("edges[{k}] weight {} must be >= 0", e.weight)));
            }
        }
        Ok(Self {
            kind: OracleKind::Cut { n, edges, directed },
            monotone: false,
        })
    }

    pub fn modular(weights: Vec<f64>) -> Result<Self> {
        check_non_negative("weights", &weights)?;
        Ok(Self {
            kind: OracleKind::Modular { weights },
            monotone: true,
        })
    }

    /// Builds an explicit table oracle. Values must be non-negative and the
    /// table must be submodular (and monotone, when `monotone` is declared);
    /// both properties are verified exhaustively for `n <= 12` and on random
    /// samples above that.
    pub fn table(n: usize, values: Vec<f64>, monotone: bool) -> Result<Self> {
        if n > TABLE_MAX_N {
            return Err(Error::Capacity {
                what: "table universe",
                size: n,
                limit: TABLE_MAX_N,
            });
        }
        if values.len() != 1usize << n {
            return Err(Error::invalid(format!(
                "table for n = {n} needs {} values, got {}",
                1usize << n,
                values.len()
            )));
        }
        check_non_negative("values", &values)?;
        verify_table(n, &values, monotone)?;
        Ok(Self {
            kind: OracleKind::Table { n, values },
            monotone,
        })
    }

    #[cfg(test)]
    pub(crate) fn table_unchecked(n: usize, values: Vec<f64>) -> Self {
        Self {
            kind: OracleKind::Table { n, values },
            monotone: false,
        }
    }

    pub fn kind(&self) -> &OracleKind {
        &self.kind
    }

    pub fn is_monotone(&self) -> bool {
        self.monotone
    }

    /// Universe size.
    pub fn n(&self) -> usize {
        match &self.kind {
            OracleKind::Coverage { sets, .. } => sets.len(),
            OracleKind::Cut { n, .. } => *n,
            OracleKind::Modular { weights } => weights.len(),
            OracleKind::Table { n, .. } => *n,
        }
    }

    pub fn mask_of(&self, set: &[usize]) -> Result<Vec<bool>> {
        let n = self.n();
        let mut mask = vec![false; n];
        for &i in set {
            if i >= n {
                return Err(Error::invalid(format!("element {i} out of range 0..{n}")));
            }
            mask[i] = true;
        }
        Ok(mask)
    }

    /// `f(S)`. Duplicate indices are ignored.
    pub fn eval(&self, set: &[usize]) -> Result<f64> {
        let mask = self.mask_of(set)?;
        Ok(self.eval_mask(&mask))
    }

    /// `f_T(S) = f(S ∪ T) - f(T)`.
    pub fn marginal(&self, base: &[usize], add: &[usize]) -> Result<f64> {
        let mut mask = self.mask_of(base)?;
        let before = self.eval_mask(&mask);
        for &i in add {
            if i >= mask.len() {
                return Err(Error::invalid(format!("element {i} out of range 0..{}", mask.len())));
            }
            mask[i] = true;
        }
        Ok(self.eval_mask(&mask) - before)
    }

    /// `f` of the set given as a membership mask of length `n`.
    pub fn eval_mask(&self, mask: &[bool]) -> f64 {
        debug_assert_eq!(mask.len(), self.n());
        match &self.kind {
            OracleKind::Coverage { sets, profits } => {
                let mut covered = vec![false; profits.len()];
                let mut total = 0.0;
                for (s, items) in sets.iter().enumerate() {
                    if !mask[s] {
                        continue;
                    }
                    for &v in items {
                        if !covered[v] {
                            covered[v] = true;
                            total += profits[v];
                        }
                    }
                }
                total
            }
            OracleKind::Cut { edges, directed, .. } => edges
                .iter()
                .filter(|e| {
                    if *directed {
                        mask[e.u] && !mask[e.v]
                    } else {
                        mask[e.u] != mask[e.v]
                    }
                })
                .map(|e| e.weight)
                .sum(),
            OracleKind::Modular { weights } => weights
                .iter()
                .zip(mask)
                .filter(|(_, &m)| m)
                .map(|(w, _)| *w)
                .sum(),
            OracleKind::Table { values, .. } => {
                let idx = mask
                    .iter()
                    .enumerate()
                    .filter(|(_, &m)| m)
                    .fold(0usize, |acc, (i, _)| acc | (1 << i));
                values[idx]
            }
        }
    }
}

fn verify_table(n: usize, values: &[f64], monotone: bool) -> Result<()> {
    let f = |m: usize| values[m];
    let check_pair = |s: usize, i: usize, j: usize| -> Result<()> {
        let (si, sj, sij) = (s | 1 << i, s | 1 << j, s | 1 << i | 1 << j);
        if f(si) + f(sj) < f(sij) + f(s) - TABLE_CHECK_TOL {
            return Err(Error::invalid(format!(
                "table is not submodular at set mask {s:#b} with elements {i}, {j}"
            )));
        }
        Ok(())
    };
    let check_mono = |s: usize, i: usize| -> Result<()> {
        if f(s | 1 << i) < f(s) - TABLE_CHECK_TOL {
            return Err(Error::invalid(format!(
                "table declared monotone but adding {i} to mask {s:#b} decreases the value"
            )));
        }
        Ok(())
    };

    if n <= TABLE_FULL_CHECK_N {
        for s in 0..(1usize << n) {
            for i in (0..n).filter(|i| s & (1 << i) == 0) {
                if monotone {
                    check_mono(s, i)?;
                }
                for j in (i + 1..n).filter(|j| s & (1 << j) == 0) {
                    check_pair(s, i, j)?;
                }
            }
        }
    } else {
        let mut rng = rng_from_seed(0x7AB1E);
        for _ in 0..TABLE_SAMPLED_CHECKS {
            let i = rng.gen_range(0..n);
            let mut j = rng.gen_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            let s = rng.gen_range(0..(1usize << n)) & !(1 << i) & !(1 << j);
            if monotone {
                check_mono(s, i)?;
            }
            check_pair(s, i, j)?;
        }
    }
    Ok(())
}
