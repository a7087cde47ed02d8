//! Randomized rounding for instances without big elements.
//!
//! A draw `D ~ y` is kept when it is ε-nearly feasible and replaced by the
//! empty set otherwise. A kept draw is then repaired one dimension at a time:
//! it is cut into consecutive blocks of cost about `ε L_r` and the block whose
//! removal costs the least value is dropped.

use crate::continuous::contains;
use crate::error::{Error, Result};
use crate::instance::{FeasibilityClass, Instance, SolutionSet};
use crate::multilinear::{sample_mask, FractionalPoint};
use crate::seed::{derive_seed, rng_from_seed};

pub const DEFAULT_ATTEMPTS: usize = 16;

/// The three stages of one rounding attempt.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundingOutcome {
    /// The raw draw `D ~ y`.
    pub drawn: SolutionSet,
    /// `D` when it is ε-nearly feasible, otherwise empty.
    pub filtered: SolutionSet,
    /// The repaired, feasible subset of `filtered`.
    pub fixed: SolutionSet,
    pub draw_class: FeasibilityClass,
}

pub(crate) fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("epsilon must lie in (0, 1), got {eps}")))
    }
}

fn check_point(inst: &Instance, y: &FractionalPoint) -> Result<()> {
    if y.len() != inst.n() {
        return Err(Error::invalid(format!(
            "point has {} entries, instance has {} elements",
            y.len(),
            inst.n()
        )));
    }
    Ok(())
}

/// Draws `R ~ y` with the shared sampling scheme.
pub fn sample_round(inst: &Instance, y: &FractionalPoint, seed: u64) -> Result<SolutionSet> {
    check_point(inst, y)?;
    let mut rng = rng_from_seed(seed);
    let mask = sample_mask(&mut rng, y.entries());
    Ok(SolutionSet::from_mask(inst, &mask))
}

/// `D` if it is ε-nearly feasible, otherwise the empty set.
pub fn filter_nearly_feasible(inst: &Instance, drawn: &SolutionSet, eps: f64) -> Result<SolutionSet> {
    check_eps(eps)?;
    if drawn.classify(inst, eps).is_nearly_feasible() {
        Ok(drawn.clone())
    } else {
        Ok(SolutionSet::empty(inst))
    }
}

/// Splits `members` for dimension `r`: elements sorted by decreasing `c_r`
/// (ties by index) fill a block until its cost reaches `ε L_r`; a trailing
/// block short of that joins the previous block.
pub fn fix_partition(inst: &Instance, members: &[usize], r: usize, eps: f64) -> Vec<Vec<usize>> {
    let threshold = eps * inst.budget()[r];
    let mut order = members.to_vec();
    order.sort_by(|&a, &b| {
        inst.cost(r, b)
            .partial_cmp(&inst.cost(r, a))
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mut parts: Vec<Vec<usize>> = Vec::new();
    let mut current = Vec::new();
    let mut load = 0.0;
    for i in order {
        current.push(i);
        load += inst.cost(r, i);
        if load >= threshold {
            parts.push(std::mem::take(&mut current));
            load = 0.0;
        }
    }
    if !current.is_empty() {
        match parts.last_mut() {
            Some(last) => last.extend(current),
            None => parts.push(current),
        }
    }
    for p in &mut parts {
        p.sort_unstable();
    }
    parts
}

fn without(members: &[usize], part: &[usize]) -> Vec<usize> {
    members
        .iter()
        .copied()
        .filter(|i| part.binary_search(i).is_err())
        .collect()
}

/// Turns an ε-nearly feasible set of small elements into a feasible subset.
///
/// Dimensions are repaired in ascending order. For a violated dimension the
/// set is partitioned with [`fix_partition`]; among blocks whose removal
/// brings the dimension within budget, the one with the smallest marginal
/// `f(S) - f(S \ S_j)` is removed (ties to the lowest block). Should rounding
/// leave no block that repairs the dimension on its own, the cheapest block
/// is removed and the dimension is examined again.
pub fn fix_nearly_feasible(inst: &Instance, set: &SolutionSet, eps: f64) -> Result<SolutionSet> {
    check_eps(eps)?;
    if let Some(&big) = set.members().iter().find(|&&i| !inst.is_small(i, eps)) {
        return Err(Error::precondition(format!(
            "element {big} is not small (cost above eps^3 times the budget)"
        )));
    }
    if !set.classify(inst, eps).is_nearly_feasible() {
        return Err(Error::precondition("set to fix is not eps-nearly feasible"));
    }
    let mut members = set.members().to_vec();
    for r in 0..inst.d() {
        let limit = inst.budget()[r];
        while inst.cost_of_set(&members)?[r] > limit {
            let value = inst.value(&members)?;
            let parts = fix_partition(inst, &members, r, eps);
            let mut best: Option<(bool, f64, usize)> = None;
            for (j, part) in parts.iter().enumerate() {
                let rest = without(&members, part);
                let repairs = inst.cost_of_set(&rest)?[r] <= limit;
                let loss = value - inst.value(&rest)?;
                let better = match best {
                    None => true,
                    Some((b_rep, b_loss, _)) => (repairs && !b_rep) || (repairs == b_rep && loss < b_loss),
                };
                if better {
                    best = Some((repairs, loss, j));
                }
            }
            let (_, _, j) = best.expect("a violated dimension has a non-empty set");
            members = without(&members, &parts[j]);
        }
    }
    let fixed = SolutionSet::new(inst, members)?;
    debug_assert!(fixed.is_feasible(inst));
    Ok(fixed)
}

fn check_no_big(inst: &Instance, y: &FractionalPoint, eps: f64) -> Result<()> {
    match (0..inst.n()).find(|&i| y.get(i) > 0.0 && !inst.is_small(i, eps)) {
        Some(i) => Err(Error::precondition(format!(
            "element {i} has positive weight in the point but is big"
        ))),
        None => Ok(()),
    }
}

/// One draw, filter and repair.
pub fn round_once(inst: &Instance, y: &FractionalPoint, eps: f64, seed: u64) -> Result<RoundingOutcome> {
    check_eps(eps)?;
    let drawn = sample_round(inst, y, seed)?;
    let draw_class = drawn.classify(inst, eps);
    let filtered = filter_nearly_feasible(inst, &drawn, eps)?;
    let fixed = fix_nearly_feasible(inst, &filtered, eps)?;
    Ok(RoundingOutcome {
        drawn,
        filtered,
        fixed,
        draw_class,
    })
}

/// Rounds a point of the polytope whose positive entries are all small.
///
/// Runs `attempts` independent draws (the first uses `seed` itself, the rest
/// derived seeds) and returns the most valuable repaired set, earliest
/// attempt first on ties. `attempts = 1` is the single-shot algorithm.
pub fn round_no_big(
    inst: &Instance,
    y: &FractionalPoint,
    eps: f64,
    seed: u64,
    attempts: usize,
) -> Result<SolutionSet> {
    check_eps(eps)?;
    check_point(inst, y)?;
    if attempts == 0 {
        return Err(Error::invalid("at least one rounding attempt is required"));
    }
    if !contains(inst, y) {
        return Err(Error::precondition("point lies outside the knapsack polytope"));
    }
    check_no_big(inst, y, eps)?;
    let mut best: Option<SolutionSet> = None;
    for k in 0..attempts {
        let s = if k == 0 { seed } else { derive_seed(seed, k as u64) };
        let fixed = round_once(inst, y, eps, s)?.fixed;
        if best.as_ref().map_or(true, |b| fixed.value() > b.value()) {
            best = Some(fixed);
        }
    }
    Ok(best.expect("attempts >= 1"))
}
