//! Exhaustive reference solvers for small instances.

use crate::error::{Error, Result};
use crate::instance::{Instance, SolutionSet};
use crate::multilinear::{FractionalPoint, EXACT_SUPPORT_LIMIT};
use crate::rounding::check_eps;

pub const EXACT_OPT_MAX_N: usize = 22;

#[derive(Debug, Clone, PartialEq)]
pub struct ExactResult {
    pub set: SolutionSet,
    pub value: f64,
    /// Feasible sets evaluated.
    pub enumerated: u64,
}

/// The integral optimum by enumerating every feasible subset.
///
/// Elements are branched on in order of decreasing largest cost so that
/// over-budget prefixes are cut early. Ties in value go to the
/// lexicographically smallest set.
pub fn exact_opt(inst: &Instance) -> Result<ExactResult> {
    let n = inst.n();
    if n > EXACT_OPT_MAX_N {
        return Err(Error::Capacity {
            what: "subset enumeration",
            size: n,
            limit: EXACT_OPT_MAX_N,
        });
    }
    let max_cost = |i: usize| (0..inst.d()).map(|r| inst.cost(r, i)).fold(0.0, f64::max);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| max_cost(b).partial_cmp(&max_cost(a)).unwrap().then(a.cmp(&b)));
    let mut search = Search {
        inst,
        order,
        mask: vec![false; n],
        load: vec![0.0; inst.d()],
        best: None,
        enumerated: 0,
    };
    search.visit(0);
    let (value, members) = search.best.expect("the empty set is always feasible");
    Ok(ExactResult {
        set: SolutionSet::new(inst, members)?,
        value,
        enumerated: search.enumerated,
    })
}

struct Search<'a> {
    inst: &'a Instance,
    order: Vec<usize>,
    mask: Vec<bool>,
    load: Vec<f64>,
    best: Option<(f64, Vec<usize>)>,
    enumerated: u64,
}

impl Search<'_> {
    fn visit(&mut self, depth: usize) {
        if depth == self.order.len() {
            // Prefix loads carry a little slack; this check is exact.
            let cost = self.inst.cost_of_mask(&self.mask);
            if cost.iter().zip(self.inst.budget()).any(|(c, l)| c > l) {
                return;
            }
            self.enumerated += 1;
            let value = self.inst.value_mask(&self.mask);
            let members: Vec<usize> = (0..self.mask.len()).filter(|&i| self.mask[i]).collect();
            let better = match &self.best {
                None => true,
                Some((v, m)) => value > *v || (value == *v && members < *m),
            };
            if better {
                self.best = Some((value, members));
            }
            return;
        }
        let i = self.order[depth];
        let d = self.load.len();
        let fits = (0..d).all(|r| self.load[r] + self.inst.cost(r, i) <= self.inst.budget()[r] + 1e-9);
        if fits {
            for r in 0..d {
                self.load[r] += self.inst.cost(r, i);
            }
            self.mask[i] = true;
            self.visit(depth + 1);
            self.mask[i] = false;
            for r in 0..d {
                self.load[r] -= self.inst.cost(r, i);
            }
        }
        self.visit(depth + 1);
    }
}

/// The exact law of one randomized rounding draw.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundingDistribution {
    /// `E[f(D')]`, the filtered draw.
    pub expected_filtered: f64,
    /// `E[f(D)]`, which equals `F(y)`.
    pub expected_unfiltered: f64,
    /// `Pr[D is not eps-nearly feasible]`.
    pub prob_not_nearly_feasible: f64,
    /// `(max_r c_r(D) / L_r, probability)` for every realization.
    pub ratio_profile: Vec<(f64, f64)>,
}

impl RoundingDistribution {
    /// `Pr[max_r c_r(D) / L_r > ell]`.
    pub fn prob_ratio_exceeds(&self, ell: f64) -> f64 {
        self.ratio_profile
            .iter()
            .filter(|(ratio, _)| *ratio > ell)
            .fold(0.0, |acc, (_, p)| acc + p)
    }
}

/// Sums over every realization of `D ~ y`, weighted by its probability.
pub fn exact_rounding_distribution(inst: &Instance, y: &FractionalPoint, eps: f64) -> Result<RoundingDistribution> {
    check_eps(eps)?;
    if y.len() != inst.n() {
        return Err(Error::invalid("point and instance sizes differ"));
    }
    let support = y.support();
    if support.len() > EXACT_SUPPORT_LIMIT {
        return Err(Error::Capacity {
            what: "fractional support",
            size: support.len(),
            limit: EXACT_SUPPORT_LIMIT,
        });
    }
    let mut mask: Vec<bool> = y.entries().iter().map(|&v| v == 1.0).collect();
    let mut out = RoundingDistribution {
        expected_filtered: 0.0,
        expected_unfiltered: 0.0,
        prob_not_nearly_feasible: 0.0,
        ratio_profile: Vec::with_capacity(1 << support.len()),
    };
    for bits in 0u64..1 << support.len() {
        let mut p = 1.0;
        for (b, &i) in support.iter().enumerate() {
            let on = bits >> b & 1 == 1;
            mask[i] = on;
            p *= if on { y.get(i) } else { 1.0 - y.get(i) };
        }
        let value = inst.value_mask(&mask);
        let cost = inst.cost_of_mask(&mask);
        out.expected_unfiltered += p * value;
        if inst.classify_cost(&cost, eps).is_nearly_feasible() {
            out.expected_filtered += p * value;
        } else {
            out.prob_not_nearly_feasible += p;
        }
        let ratio = cost
            .iter()
            .zip(inst.budget())
            .map(|(c, l)| if *l > 0.0 { c / l } else if *c > 0.0 { f64::INFINITY } else { 0.0 })
            .fold(0.0, f64::max);
        out.ratio_profile.push((ratio, p));
    }
    Ok(out)
}
