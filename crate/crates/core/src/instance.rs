//! Problem instances, solution sets and feasibility arithmetic.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::multilinear::FractionalPoint;
use crate::oracle::SubmodularOracle;

/// A submodular maximization problem under `d` knapsack constraints.
///
/// Costs are stored normalized: instances built with [`Instance::new`] divide
/// row `r` of the cost matrix by the user budget `L_r`, so every budget is 1.
/// Residual instances carry budgets `1 - c(T)` instead, which may be zero.
///
/// An instance may view a subset of the oracle's universe; local element `i`
/// is then oracle element `embedding[i]`.
#[derive(Debug, Clone)]
pub struct Instance {
    n: usize,
    cost: Vec<Vec<f64>>,
    budget: Vec<f64>,
    oracle: Arc<SubmodularOracle>,
    embedding: Option<Arc<[usize]>>,
}

/// Where a set sits relative to the budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FeasibilityClass {
    Feasible,
    /// Within `(1 + eps) L` in every dimension but over `L` in some.
    NearlyFeasible(f64),
    Infeasible(f64),
}

impl FeasibilityClass {
    pub fn is_feasible(&self) -> bool {
        matches!(self, FeasibilityClass::Feasible)
    }

    /// Feasible or nearly feasible.
    pub fn is_nearly_feasible(&self) -> bool {
        !matches!(self, FeasibilityClass::Infeasible(_))
    }
}

impl fmt::Display for FeasibilityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeasibilityClass::Feasible => write!(f, "feasible"),
            FeasibilityClass::NearlyFeasible(_) => write!(f, "nearly-feasible"),
            FeasibilityClass::Infeasible(_) => write!(f, "infeasible"),
        }
    }
}

fn check_matrix(cost: &[Vec<f64>], n: usize) -> Result<()> {
    for (r, row) in cost.iter().enumerate() {
        if row.len() != n {
            return Err(Error::invalid(format!(
                "cost row {r} has {} entries, expected {n}",
                row.len()
            )));
        }
        for (i, &c) in row.iter().enumerate() {
            if !c.is_finite() || c < 0.0 {
                return Err(Error::invalid(format!("cost[{r}][{i}] = {c} must be finite and >= 0")));
            }
        }
    }
    Ok(())
}

impl Instance {
    /// Builds an instance from a `d x n` cost matrix and positive budgets,
    /// normalizing every budget to 1.
    pub fn new(cost: Vec<Vec<f64>>, budget: Vec<f64>, oracle: SubmodularOracle) -> Result<Self> {
        if cost.is_empty() {
            return Err(Error::invalid("at least one knapsack dimension is required"));
        }
        if budget.len() != cost.len() {
            return Err(Error::invalid(format!(
                "{} budgets for {} cost rows",
                budget.len(),
                cost.len()
            )));
        }
        let n = oracle.n();
        check_matrix(&cost, n)?;
        for (r, &b) in budget.iter().enumerate() {
            if !b.is_finite() || b <= 0.0 {
                return Err(Error::invalid(format!("budget[{r}] = {b} must be finite and > 0")));
            }
        }
        let cost = cost
            .into_iter()
            .zip(&budget)
            .map(|(row, &b)| row.into_iter().map(|c| c / b).collect())
            .collect();
        Ok(Self {
            n,
            budget: vec![1.0; budget.len()],
            cost,
            oracle: Arc::new(oracle),
            embedding: None,
        })
    }

    /// An instance over the oracle elements `universe` (in that order) with
    /// explicit, already normalized costs and budgets.
    pub(crate) fn restricted(
        &self,
        universe: &[usize],
        cost: Vec<Vec<f64>>,
        budget: Vec<f64>,
    ) -> Self {
        let embedding: Vec<usize> = universe.iter().map(|&i| self.oracle_index(i)).collect();
        debug_assert!(check_matrix(&cost, universe.len()).is_ok());
        debug_assert!(budget.iter().all(|&b| b >= 0.0));
        Self {
            n: universe.len(),
            cost,
            budget,
            oracle: Arc::clone(&self.oracle),
            embedding: Some(embedding.into()),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.budget.len()
    }

    pub fn cost(&self, r: usize, i: usize) -> f64 {
        self.cost[r][i]
    }

    pub fn cost_matrix(&self) -> &[Vec<f64>] {
        &self.cost
    }

    pub fn element_cost(&self, i: usize) -> Vec<f64> {
        self.cost.iter().map(|row| row[i]).collect()
    }

    pub fn budget(&self) -> &[f64] {
        &self.budget
    }

    pub fn oracle(&self) -> &SubmodularOracle {
        &self.oracle
    }

    pub fn is_monotone(&self) -> bool {
        self.oracle.is_monotone()
    }

    pub(crate) fn oracle_index(&self, i: usize) -> usize {
        match &self.embedding {
            Some(map) => map[i],
            None => i,
        }
    }

    /// Lifts a local membership mask to the oracle's universe.
    pub(crate) fn oracle_mask(&self, mask: &[bool]) -> Vec<bool> {
        match &self.embedding {
            None => mask.to_vec(),
            Some(map) => {
                let mut full = vec![false; self.oracle.n()];
                for (i, _) in mask.iter().enumerate().filter(|(_, &m)| m) {
                    full[map[i]] = true;
                }
                full
            }
        }
    }

    /// Lifts a local point to the oracle's universe, with zeros outside.
    pub(crate) fn oracle_point(&self, y: &[f64]) -> Vec<f64> {
        match &self.embedding {
            None => y.to_vec(),
            Some(map) => {
                let mut full = vec![0.0; self.oracle.n()];
                for (i, &v) in y.iter().enumerate() {
                    full[map[i]] = v;
                }
                full
            }
        }
    }

    fn check_range(&self, set: &[usize]) -> Result<()> {
        match set.iter().find(|&&i| i >= self.n) {
            Some(i) => Err(Error::invalid(format!("element {i} out of range 0..{}", self.n))),
            None => Ok(()),
        }
    }

    pub fn mask_of(&self, set: &[usize]) -> Result<Vec<bool>> {
        self.check_range(set)?;
        let mut mask = vec![false; self.n];
        for &i in set {
            mask[i] = true;
        }
        Ok(mask)
    }

    /// `f(S)`.
    pub fn value(&self, set: &[usize]) -> Result<f64> {
        let mask = self.mask_of(set)?;
        Ok(self.value_mask(&mask))
    }

    pub fn value_mask(&self, mask: &[bool]) -> f64 {
        match &self.embedding {
            None => self.oracle.eval_mask(mask),
            Some(_) => self.oracle.eval_mask(&self.oracle_mask(mask)),
        }
    }

    /// `f_T(S) = f(S ∪ T) - f(T)`.
    pub fn marginal(&self, base: &[usize], add: &[usize]) -> Result<f64> {
        self.check_range(add)?;
        let mut mask = self.mask_of(base)?;
        let before = self.value_mask(&mask);
        for &i in add {
            mask[i] = true;
        }
        Ok(self.value_mask(&mask) - before)
    }

    /// `c(S)`, summed in ascending element order.
    pub fn cost_of_set(&self, set: &[usize]) -> Result<Vec<f64>> {
        let mask = self.mask_of(set)?;
        Ok(self.cost_of_mask(&mask))
    }

    pub fn cost_of_mask(&self, mask: &[bool]) -> Vec<f64> {
        self.cost
            .iter()
            .map(|row| {
                row.iter()
                    .zip(mask)
                    .filter(|(_, &m)| m)
                    .map(|(c, _)| *c)
                    .sum()
            })
            .collect()
    }

    /// `c(y) = Σ_i c(i) y_i`.
    pub fn cost_of_point(&self, y: &FractionalPoint) -> Vec<f64> {
        self.cost_of_entries(y.entries())
    }

    pub fn cost_of_entries(&self, y: &[f64]) -> Vec<f64> {
        debug_assert_eq!(y.len(), self.n);
        self.cost
            .iter()
            .map(|row| row.iter().zip(y).map(|(c, v)| c * v).sum())
            .collect()
    }

    /// Classifies a cost vector. Comparisons are inclusive with no slack.
    pub fn classify_cost(&self, cost: &[f64], eps: f64) -> FeasibilityClass {
        let budget = &self.budget;
        if cost.iter().zip(budget).all(|(c, l)| c <= l) {
            FeasibilityClass::Feasible
        } else if cost.iter().zip(budget).all(|(c, l)| *c <= (1.0 + eps) * l) {
            FeasibilityClass::NearlyFeasible(eps)
        } else {
            FeasibilityClass::Infeasible(eps)
        }
    }

    pub fn classify(&self, set: &[usize], eps: f64) -> Result<FeasibilityClass> {
        if !(eps > 0.0) {
            return Err(Error::invalid(format!("epsilon must be > 0, got {eps}")));
        }
        Ok(self.classify_cost(&self.cost_of_set(set)?, eps))
    }

    pub fn is_feasible(&self, set: &[usize]) -> Result<bool> {
        let cost = self.cost_of_set(set)?;
        Ok(cost.iter().zip(&self.budget).all(|(c, l)| c <= l))
    }

    /// Element `i` is small when `c(i) <= eps^3 L` in every dimension.
    pub fn is_small(&self, i: usize, eps: f64) -> bool {
        let t = eps.powi(3);
        self.cost
            .iter()
            .zip(&self.budget)
            .all(|(row, &l)| row[i] <= t * l)
    }
}

/// A subset of the universe with its cost vector and value cached.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionSet {
    members: Vec<usize>,
    cost: Vec<f64>,
    value: f64,
}

impl SolutionSet {
    pub fn new(inst: &Instance, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut members: Vec<usize> = members.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        let mask = inst.mask_of(&members)?;
        Ok(Self {
            cost: inst.cost_of_mask(&mask),
            value: inst.value_mask(&mask),
            members,
        })
    }

    pub(crate) fn from_mask(inst: &Instance, mask: &[bool]) -> Self {
        Self {
            members: mask
                .iter()
                .enumerate()
                .filter(|(_, &m)| m)
                .map(|(i, _)| i)
                .collect(),
            cost: inst.cost_of_mask(mask),
            value: inst.value_mask(mask),
        }
    }

    pub fn empty(inst: &Instance) -> Self {
        Self::from_mask(inst, &vec![false; inst.n()])
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn cost(&self) -> &[f64] {
        &self.cost
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members.binary_search(&i).is_ok()
    }

    pub fn classify(&self, inst: &Instance, eps: f64) -> FeasibilityClass {
        inst.classify_cost(&self.cost, eps)
    }

    pub fn is_feasible(&self, inst: &Instance) -> bool {
        self.classify(inst, 1.0).is_feasible()
    }
}
