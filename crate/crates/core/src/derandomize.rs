//! Deterministic rounding via pipage steps.
//!
//! Fractional entries are grouped by a geometric quantization of their
//! costs. Within a group, mass is moved between two entries along
//! `e_i - e_j`, where `F` is convex, to whichever endpoint has larger `F`;
//! each move makes one entry integral and leaves the quantized cost of the
//! point unchanged. Two such passes leave few enough fractional entries to
//! enumerate every realization.

use std::collections::BTreeMap;

use crate::continuous::{contains, ContinuousSolver};
use crate::enumeration::{enumerate_and_round, Rounded, SolveOutcome};
use crate::error::{Error, Result};
use crate::instance::{Instance, SolutionSet};
use crate::multilinear::{
    delta_bounds, extension_estimate, extension_value, has_exact_extension, pipage_point,
    FractionalPoint,
};
use crate::rounding::{check_eps, fix_nearly_feasible};
use crate::seed::derive_seed;

/// At most `2^REALIZATION_LIMIT_BITS` realizations are enumerated.
pub const REALIZATION_LIMIT_BITS: usize = 25;

pub const DEFAULT_PIPAGE_SAMPLES: usize = 1000;
pub const DEFAULT_PIPAGE_SAMPLE_CAP: usize = 64_000;

/// Marker key for costs quantized to zero.
const ZERO_RUNG: i64 = -1;

/// `(8 ln(2k) / eps)^d`.
pub fn fractional_bound(k: usize, eps: f64, d: usize) -> f64 {
    (8.0 * (2.0 * k as f64).ln() / eps).powi(d as i32)
}

/// Costs rounded down to a geometric ladder, built for a point with `k`
/// fractional entries.
///
/// For a fractional element, `c'_r(i) = 0` when `c_r(i) <= θ_r` with
/// `θ_r = eps L_r / (2k)`, and otherwise the largest `θ_r (1 + eps/2)^j` not
/// above `c_r(i)`. Integral elements keep their costs and have no class.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizedCosts {
    k: usize,
    eps: f64,
    cost: Vec<Vec<f64>>,
    keys: Vec<Option<Vec<i64>>>,
}

impl QuantizedCosts {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn cost(&self, r: usize, i: usize) -> f64 {
        self.cost[r][i]
    }

    /// Ladder rungs of a fractional element, `-1` for a zero cost.
    pub fn class_key(&self, i: usize) -> Option<&[i64]> {
        self.keys[i].as_deref()
    }

    /// Quantized cost of a point.
    pub fn cost_of_point(&self, y: &FractionalPoint) -> Vec<f64> {
        self.cost
            .iter()
            .map(|row| row.iter().zip(y.entries()).map(|(c, v)| c * v).sum())
            .collect()
    }

    /// Fractional entries of `y` grouped by class key.
    pub fn classes(&self, y: &FractionalPoint) -> BTreeMap<Vec<i64>, Vec<usize>> {
        let mut out: BTreeMap<Vec<i64>, Vec<usize>> = BTreeMap::new();
        for &i in y.support() {
            if let Some(key) = &self.keys[i] {
                out.entry(key.clone()).or_default().push(i);
            }
        }
        out
    }
}

fn check_support_small(inst: &Instance, y: &FractionalPoint, eps: f64, positive: bool) -> Result<()> {
    let big = (0..inst.n()).find(|&i| {
        let active = if positive { y.get(i) > 0.0 } else { y.support().contains(&i) };
        active && !inst.is_small(i, eps)
    });
    match big {
        Some(i) => Err(Error::precondition(format!("element {i} in the support is big"))),
        None => Ok(()),
    }
}

fn rung(c: f64, theta: f64, ratio: f64) -> i64 {
    if c <= theta {
        return ZERO_RUNG;
    }
    let mut j = ((c / theta).ln() / ratio.ln()).floor().max(0.0) as i64;
    while j > 0 && theta * ratio.powi(j as i32) > c {
        j -= 1;
    }
    while theta * ratio.powi(j as i32 + 1) <= c {
        j += 1;
    }
    j
}

fn quantize_with(inst: &Instance, y: &FractionalPoint, eps: f64, budget: &[f64]) -> QuantizedCosts {
    let k = y.fractional_count();
    let ratio = 1.0 + eps / 2.0;
    let mut cost: Vec<Vec<f64>> = inst.cost_matrix().to_vec();
    let mut keys = vec![None; inst.n()];
    for &i in y.support() {
        let mut key = Vec::with_capacity(inst.d());
        for (r, &l) in budget.iter().enumerate() {
            let theta = eps * l / (2.0 * k as f64);
            let j = rung(inst.cost(r, i), theta, ratio);
            cost[r][i] = if j == ZERO_RUNG { 0.0 } else { theta * ratio.powi(j as i32) };
            key.push(j);
        }
        keys[i] = Some(key);
    }
    QuantizedCosts { k, eps, cost, keys }
}

/// Quantizes the costs of the fractional support of `y`.
pub fn quantize(inst: &Instance, y: &FractionalPoint, eps: f64) -> Result<QuantizedCosts> {
    check_eps(eps)?;
    if y.len() != inst.n() {
        return Err(Error::invalid("point and instance sizes differ"));
    }
    if y.fractional_count() == 0 {
        return Err(Error::precondition("quantization needs at least one fractional entry"));
    }
    check_support_small(inst, y, eps, false)?;
    Ok(quantize_with(inst, y, eps, inst.budget()))
}

/// How `F` is compared at the two endpoints of a pipage step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PipageEval {
    /// Closed form or exhaustive sum.
    Exact,
    /// Paired Monte Carlo estimates. An endpoint wins once the estimates
    /// differ by more than 3 standard errors; otherwise the sample count is
    /// quadrupled up to `max_samples`, after which `δ+` is taken.
    Sampled {
        samples: usize,
        max_samples: usize,
        seed: u64,
    },
}

impl PipageEval {
    /// Exact when available, sampled otherwise.
    pub fn for_instance(inst: &Instance) -> Self {
        if has_exact_extension(inst) {
            PipageEval::Exact
        } else {
            PipageEval::Sampled {
                samples: DEFAULT_PIPAGE_SAMPLES,
                max_samples: DEFAULT_PIPAGE_SAMPLE_CAP,
                seed: 0,
            }
        }
    }
}

/// One pipage move `y -> y + δ e_i - δ e_j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipageStep {
    pub i: usize,
    pub j: usize,
    pub delta_minus: f64,
    pub delta_plus: f64,
    pub chosen: f64,
    pub f_before: f64,
    pub f_after: f64,
    /// `F` at the endpoint not taken.
    pub f_other: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReductionTrace {
    pub quantized: QuantizedCosts,
    pub steps: Vec<PipageStep>,
    pub initial_fractional: usize,
    pub final_fractional: usize,
}

fn evaluate_pair(
    inst: &Instance,
    minus: &FractionalPoint,
    plus: &FractionalPoint,
    eval: PipageEval,
    step: usize,
) -> Result<(f64, f64)> {
    match eval {
        PipageEval::Exact => Ok((extension_value(inst, minus)?, extension_value(inst, plus)?)),
        PipageEval::Sampled {
            samples,
            max_samples,
            seed,
        } => {
            let s = derive_seed(seed, step as u64);
            let mut count = samples.max(2);
            loop {
                let a = extension_estimate(inst, minus, count, s)?;
                let b = extension_estimate(inst, plus, count, s)?;
                let margin = 3.0 * (a.stderr.powi(2) + b.stderr.powi(2)).sqrt();
                if (b.mean - a.mean).abs() > margin {
                    return Ok((a.mean, b.mean));
                }
                if count.saturating_mul(4) > max_samples {
                    // Report a tie so that δ+ is chosen.
                    return Ok((b.mean, b.mean));
                }
                count *= 4;
            }
        }
    }
}

fn point_value(inst: &Instance, y: &FractionalPoint, eval: PipageEval) -> Result<f64> {
    match eval {
        PipageEval::Exact => extension_value(inst, y),
        PipageEval::Sampled { samples, seed, .. } => {
            Ok(extension_estimate(inst, y, samples.max(2), seed)?.mean)
        }
    }
}

/// Pipage reduction with quantization thresholds taken from `budget`.
pub fn pipage_reduce_with(
    inst: &Instance,
    y: &FractionalPoint,
    eps: f64,
    budget: &[f64],
    eval: PipageEval,
) -> Result<(FractionalPoint, ReductionTrace)> {
    check_eps(eps)?;
    if y.len() != inst.n() || budget.len() != inst.d() {
        return Err(Error::invalid("point, budget and instance sizes differ"));
    }
    check_support_small(inst, y, eps, false)?;
    let quantized = quantize_with(inst, y, eps, budget);
    let initial_fractional = y.fractional_count();
    let mut y = y.clone();
    let mut steps = Vec::new();
    let mut current = point_value(inst, &y, eval)?;
    loop {
        let classes = quantized.classes(&y);
        // Largest class, ties to the one holding the smallest index.
        let Some(members) = classes
            .values()
            .filter(|m| m.len() >= 2)
            .max_by(|a, b| a.len().cmp(&b.len()).then(b[0].cmp(&a[0])))
        else {
            break;
        };
        let (i, j) = (members[0], members[1]);
        let (lo, hi) = delta_bounds(&y, i, j)?;
        let minus = pipage_point(&y, i, j, lo)?;
        let plus = pipage_point(&y, i, j, hi)?;
        let (f_minus, f_plus) = evaluate_pair(inst, &minus, &plus, eval, steps.len())?;
        let take_plus = f_plus >= f_minus;
        let (next, chosen, f_after, f_other) = if take_plus {
            (plus, hi, f_plus, f_minus)
        } else {
            (minus, lo, f_minus, f_plus)
        };
        debug_assert!(next.fractional_count() < y.fractional_count());
        steps.push(PipageStep {
            i,
            j,
            delta_minus: lo,
            delta_plus: hi,
            chosen,
            f_before: current,
            f_after,
            f_other,
        });
        current = f_after;
        y = next;
    }
    let final_fractional = y.fractional_count();
    Ok((
        y,
        ReductionTrace {
            quantized,
            steps,
            initial_fractional,
            final_fractional,
        },
    ))
}

/// Eliminates fractional entries until no two share a quantization class.
pub fn pipage_reduce(inst: &Instance, y: &FractionalPoint, eps: f64) -> Result<(FractionalPoint, ReductionTrace)> {
    pipage_reduce_with(inst, y, eps, inst.budget(), PipageEval::for_instance(inst))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DoubleReduction {
    pub point: FractionalPoint,
    pub first: ReductionTrace,
    pub second: ReductionTrace,
}

/// Two pipage passes; the second is quantized for the fractional count the
/// first one left and uses thresholds for the budget `(1 + eps) budget`.
pub fn double_reduce_with(
    inst: &Instance,
    y: &FractionalPoint,
    eps: f64,
    budget: &[f64],
    eval: PipageEval,
) -> Result<DoubleReduction> {
    let (mid, first) = pipage_reduce_with(inst, y, eps, budget, eval)?;
    let inflated: Vec<f64> = budget.iter().map(|l| (1.0 + eps) * l).collect();
    let (point, second) = pipage_reduce_with(inst, &mid, eps, &inflated, eval)?;
    Ok(DoubleReduction { point, first, second })
}

pub fn double_reduce(inst: &Instance, y: &FractionalPoint, eps: f64) -> Result<DoubleReduction> {
    double_reduce_with(inst, y, eps, inst.budget(), PipageEval::for_instance(inst))
}

/// Every realization of `R ~ y`: the ones of `y` plus each subset of the
/// fractional support, bit `b` of a binary counter selecting the `b`-th
/// fractional element.
#[derive(Debug, Clone)]
pub struct Realizations {
    ones: Vec<usize>,
    support: Vec<usize>,
    next: u64,
    total: u64,
}

impl Realizations {
    pub fn total(&self) -> u64 {
        self.total
    }
}

impl Iterator for Realizations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.next >= self.total {
            return None;
        }
        let bits = self.next;
        self.next += 1;
        let mut set = self.ones.clone();
        set.extend(
            self.support
                .iter()
                .enumerate()
                .filter(|(b, _)| bits >> b & 1 == 1)
                .map(|(_, &i)| i),
        );
        set.sort_unstable();
        Some(set)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.total - self.next) as usize;
        (left, Some(left))
    }
}

pub fn enumerate_realizations(y: &FractionalPoint) -> Result<Realizations> {
    let s = y.fractional_count();
    if s > REALIZATION_LIMIT_BITS {
        return Err(Error::Capacity {
            what: "fractional support for realization enumeration (increase epsilon or round randomly)",
            size: s,
            limit: REALIZATION_LIMIT_BITS,
        });
    }
    Ok(Realizations {
        ones: y.ones(),
        support: y.support().to_vec(),
        next: 0,
        total: 1u64 << s,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeterministicOutcome {
    pub solution: SolutionSet,
    /// Fractional entries of the scaled point entering the reduction, and of
    /// the reduced point.
    pub frac_before: usize,
    pub frac_after: usize,
    pub realizations: u64,
}

/// Deterministic rounding for a point of the polytope whose positive
/// entries are small.
///
/// Scales `y` by `(1 + eps)^-2`, reduces it with two pipage passes, and
/// returns the most valuable repaired set over all near-feasible
/// realizations (the first one on ties, the empty set if none survive).
pub fn round_deterministic_with(
    inst: &Instance,
    y: &FractionalPoint,
    eps: f64,
    eval: PipageEval,
) -> Result<DeterministicOutcome> {
    check_eps(eps)?;
    if y.len() != inst.n() {
        return Err(Error::invalid("point and instance sizes differ"));
    }
    if !contains(inst, y) {
        return Err(Error::precondition("point lies outside the knapsack polytope"));
    }
    check_support_small(inst, y, eps, true)?;
    let shrink = (1.0 + eps).powi(-2);
    let scaled = y.scaled(shrink)?;
    let budget: Vec<f64> = inst.budget().iter().map(|l| shrink * l).collect();
    let reduced = double_reduce_with(inst, &scaled, eps, &budget, eval)?;
    let realizations = enumerate_realizations(&reduced.point)?;
    let total = realizations.total();
    let mut best = SolutionSet::empty(inst);
    let mut found = false;
    for set in realizations {
        if !inst.classify(&set, eps)?.is_nearly_feasible() {
            continue;
        }
        let fixed = fix_nearly_feasible(inst, &SolutionSet::new(inst, set)?, eps)?;
        if !found || fixed.value() > best.value() {
            best = fixed;
            found = true;
        }
    }
    Ok(DeterministicOutcome {
        solution: best,
        frac_before: scaled.fractional_count(),
        frac_after: reduced.point.fractional_count(),
        realizations: total,
    })
}

pub fn round_deterministic(inst: &Instance, y: &FractionalPoint, eps: f64) -> Result<SolutionSet> {
    Ok(round_deterministic_with(inst, y, eps, PipageEval::for_instance(inst))?.solution)
}

/// The guess loop of [`crate::enumeration::solve_randomized`] with
/// deterministic rounding. `seed` only reaches the continuous solver.
pub fn solve_deterministic(
    inst: &Instance,
    solver: &dyn ContinuousSolver,
    eps: f64,
    h: usize,
    seed: u64,
) -> Result<SolveOutcome> {
    enumerate_and_round(inst, solver, eps, h, seed, |res, y, _| {
        let out = round_deterministic_with(res, y, eps, PipageEval::for_instance(res))?;
        Ok(Rounded {
            set: out.solution,
            frac: Some((out.frac_before, out.frac_after)),
        })
    })
}
