//! Guessing a few elements up front so that only small elements get rounded.
//!
//! For every feasible `T` with `|T| <= h` the residual instance keeps `T` at
//! zero cost, drops elements that are big relative to the leftover budget
//! `L - c(T)`, and is handed to a continuous solver and a rounder. The best
//! candidate over all guesses is returned.

use crate::continuous::ContinuousSolver;
use crate::error::{Error, Result};
use crate::instance::{Instance, SolutionSet};
use crate::multilinear::FractionalPoint;
use crate::rounding::{check_eps, round_no_big};
use crate::seed::{derive_seed, derive_seed_for_set};

/// Largest guess size the enumeration defaults to.
pub const DESK_H_CAP: u64 = 3;

/// `ceil(d / eps^4)`, saturating.
pub fn h_paper(d: usize, eps: f64) -> u64 {
    let h = (d as f64 / eps.powi(4)).ceil();
    if h.is_finite() && h < u64::MAX as f64 {
        h as u64
    } else {
        u64::MAX
    }
}

/// `min(ceil(d / eps^4), 3)`.
pub fn default_h(d: usize, eps: f64) -> usize {
    h_paper(d, eps).min(DESK_H_CAP) as usize
}

/// The instance left after committing to the guessed set `T`.
#[derive(Debug, Clone)]
pub struct ResidualInstance {
    guessed: Vec<usize>,
    universe: Vec<usize>,
    budget: Vec<f64>,
    instance: Instance,
}

impl ResidualInstance {
    /// The guessed set, in base indices.
    pub fn guessed(&self) -> &[usize] {
        &self.guessed
    }

    /// Base index of every residual element, ascending.
    pub fn universe(&self) -> &[usize] {
        &self.universe
    }

    /// `L' = L - c(T)`, lowered by a rounding guard.
    pub fn budget(&self) -> &[f64] {
        &self.budget
    }

    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    /// Residual indices of the guessed elements.
    pub fn local_guessed(&self) -> Vec<usize> {
        self.guessed
            .iter()
            .map(|g| self.universe.binary_search(g).expect("guessed elements stay in the universe"))
            .collect()
    }

    /// Maps residual indices back to base indices.
    pub fn lift(&self, local: &[usize]) -> Vec<usize> {
        let mut base: Vec<usize> = local.iter().map(|&i| self.universe[i]).collect();
        base.sort_unstable();
        base
    }
}

/// Builds the residual instance for the guess `T`.
///
/// `L' = L - c(T)` is lowered by `4 (n + 2) u L` (u the unit roundoff) so that
/// `c(S) <= L` still holds after floating-point summation for every lifted
/// residual-feasible `S`.
pub fn residual(inst: &Instance, guessed: &[usize], eps: f64) -> Result<ResidualInstance> {
    check_eps(eps)?;
    let mut t = guessed.to_vec();
    t.sort_unstable();
    t.dedup();
    let spent = inst.cost_of_set(&t)?;
    if spent.iter().zip(inst.budget()).any(|(c, l)| c > l) {
        return Err(Error::invalid(format!("guessed set {t:?} exceeds the budget")));
    }
    let guard = 4.0 * (inst.n() as f64 + 2.0) * f64::EPSILON;
    let budget: Vec<f64> = spent
        .iter()
        .zip(inst.budget())
        .map(|(c, l)| (l - c - guard * l).max(0.0))
        .collect();
    let small = eps.powi(3);
    let universe: Vec<usize> = (0..inst.n())
        .filter(|i| {
            t.binary_search(i).is_ok()
                || (0..inst.d()).all(|r| inst.cost(r, *i) <= small * budget[r])
        })
        .collect();
    let cost = (0..inst.d())
        .map(|r| {
            universe
                .iter()
                .map(|i| if t.binary_search(i).is_ok() { 0.0 } else { inst.cost(r, *i) })
                .collect()
        })
        .collect();
    let instance = inst.restricted(&universe, cost, budget.clone());
    debug_assert!((0..instance.n()).all(|i| instance.is_small(i, eps)));
    Ok(ResidualInstance {
        guessed: t,
        universe,
        budget,
        instance,
    })
}

/// Feasible sets of at most `h` elements in lexicographic order, starting
/// with the empty set. Infeasible prefixes are pruned.
#[derive(Debug, Clone)]
pub struct GuessSets<'a> {
    inst: &'a Instance,
    h: usize,
    current: Vec<usize>,
    started: bool,
    done: bool,
}

pub fn guess_sets(inst: &Instance, h: usize) -> GuessSets<'_> {
    GuessSets {
        inst,
        h,
        current: Vec::new(),
        started: false,
        done: false,
    }
}

impl GuessSets<'_> {
    fn fits(&self, extra: usize) -> bool {
        let mut set = self.current.clone();
        set.push(extra);
        self.inst.is_feasible(&set).unwrap_or(false)
    }

    fn first_fit_from(&self, start: usize) -> Option<usize> {
        (start..self.inst.n()).find(|&j| self.fits(j))
    }

    fn advance(&mut self) -> bool {
        if self.current.len() < self.h {
            let start = self.current.last().map_or(0, |&l| l + 1);
            if let Some(j) = self.first_fit_from(start) {
                self.current.push(j);
                return true;
            }
        }
        while let Some(last) = self.current.pop() {
            if let Some(j) = self.first_fit_from(last + 1) {
                self.current.push(j);
                return true;
            }
        }
        false
    }
}

impl Iterator for GuessSets<'_> {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(Vec::new());
        }
        if self.advance() {
            Some(self.current.clone())
        } else {
            self.done = true;
            None
        }
    }
}

/// Result of an enumeration run.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    pub solution: SolutionSet,
    /// The guess that produced `solution`.
    pub best_guess: Vec<usize>,
    /// `solution` is the bare guess rather than a rounded residual solution.
    pub from_bare_guess: bool,
    pub guesses: usize,
    pub h: usize,
    /// Fractional entries of the winning continuous point before and after
    /// pipage reduction (deterministic rounding only).
    pub frac_before: Option<usize>,
    pub frac_after: Option<usize>,
}

/// What a rounder hands back for one guess.
pub(crate) struct Rounded {
    pub set: SolutionSet,
    pub frac: Option<(usize, usize)>,
}

/// The shared guess loop. `round` maps a residual instance, its continuous
/// point and a seed to a residual solution.
pub(crate) fn enumerate_and_round<F>(
    inst: &Instance,
    solver: &dyn ContinuousSolver,
    eps: f64,
    h: usize,
    seed: u64,
    round: F,
) -> Result<SolveOutcome>
where
    F: Fn(&Instance, &FractionalPoint, u64) -> Result<Rounded>,
{
    check_eps(eps)?;
    let mut best: Option<SolveOutcome> = None;
    let mut guesses = 0;
    for t in guess_sets(inst, h) {
        guesses += 1;
        let with_guess = |e: Error| Error::Solver {
            guess: t.clone(),
            source: Box::new(e),
        };
        let res = residual(inst, &t, eps)?;
        let t_seed = derive_seed_for_set(seed, &t);
        let y = solver
            .solve(res.instance(), derive_seed(t_seed, 0))
            .map_err(with_guess)?;
        let rounded = round(res.instance(), &y, derive_seed(t_seed, 1)).map_err(with_guess)?;
        let lifted = SolutionSet::new(inst, res.lift(rounded.set.members()))?;
        let bare = SolutionSet::new(inst, t.iter().copied())?;
        let mut candidates = vec![(lifted, false), (bare, true)];
        // Lifting cannot break feasibility in exact arithmetic; float sums get re-checked.
        candidates.retain(|(s, _)| s.is_feasible(inst));
        candidates.sort_by(|a, b| {
            b.0.value()
                .partial_cmp(&a.0.value())
                .unwrap_or(std::cmp::Ordering::Equal)
                .then_with(|| a.0.members().cmp(b.0.members()))
        });
        let Some((solution, from_bare_guess)) = candidates.into_iter().next() else {
            continue;
        };
        if best.as_ref().map_or(true, |b| solution.value() > b.solution.value()) {
            best = Some(SolveOutcome {
                solution,
                best_guess: t.clone(),
                from_bare_guess,
                guesses: 0,
                h,
                frac_before: rounded.frac.map(|f| f.0),
                frac_after: rounded.frac.map(|f| f.1),
            });
        }
    }
    let mut out = best.expect("the empty guess always yields a feasible candidate");
    out.guesses = guesses;
    Ok(out)
}

/// Enumerates guesses of size at most `h`, solves each residual relaxation
/// with `solver` and rounds it with [`round_no_big`].
///
/// Every candidate is feasible for `inst`. Besides the rounded residual
/// solution, each guess `T` is itself a candidate. Ties go to the
/// lexicographically smallest guess, then the smallest member set.
pub fn solve_randomized(
    inst: &Instance,
    solver: &dyn ContinuousSolver,
    eps: f64,
    h: usize,
    seed: u64,
    attempts: usize,
) -> Result<SolveOutcome> {
    enumerate_and_round(inst, solver, eps, h, seed, |res, y, s| {
        Ok(Rounded {
            set: round_no_big(res, y, eps, s, attempts)?,
            frac: None,
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::continuous::{ContinuousMethod, MethodSolver};
    use crate::oracle::SubmodularOracle;

    fn modular(costs: Vec<f64>, weights: Vec<f64>) -> Instance {
        Instance::new(vec![costs], vec![1.0], SubmodularOracle::modular(weights).unwrap()).unwrap()
    }

    fn greedy() -> MethodSolver {
        MethodSolver::new(
            "cg",
            ContinuousMethod::ContinuousGreedy {
                steps: 20,
                samples_per_gradient: 0,
                exact_marginals: true,
            },
        )
        .unwrap()
    }

    #[test]
    fn h_values() {
        assert_eq!(h_paper(1, 0.5), 16);
        assert_eq!(h_paper(2, 0.3), 247);
        assert_eq!(default_h(1, 0.5), 3);
        assert_eq!(default_h(1, 0.99), 2);
        assert_eq!(h_paper(1, 1e-90), u64::MAX);
    }

    #[test]
    fn empty_guess_keeps_small_elements() {
        let inst = modular(vec![0.01, 0.02, 0.0], vec![1.0; 3]);
        let res = residual(&inst, &[], 0.5).unwrap();
        assert_eq!(res.universe(), &[0, 1, 2]);
        for i in 0..3 {
            assert_eq!(res.instance().cost(0, i), inst.cost(0, i));
        }
    }

    #[test]
    fn guessing_drops_big_elements() {
        let inst = modular(vec![0.5, 0.3, 0.2], vec![1.0; 3]);
        let res = residual(&inst, &[0], 0.5).unwrap();
        assert!((res.budget()[0] - 0.5).abs() < 1e-12);
        assert_eq!(res.universe(), &[0]);
        assert_eq!(res.instance().cost(0, 0), 0.0);
        assert_eq!(res.local_guessed(), vec![0]);
    }

    #[test]
    fn infeasible_guess_is_rejected() {
        let inst = modular(vec![0.6, 0.6], vec![1.0; 2]);
        assert!(matches!(residual(&inst, &[0, 1], 0.5), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn guess_enumeration_order_and_counts() {
        let inst = modular(vec![0.1; 3], vec![1.0; 3]);
        assert_eq!(guess_sets(&inst, 0).collect::<Vec<_>>(), vec![Vec::<usize>::new()]);
        assert_eq!(
            guess_sets(&inst, 1).collect::<Vec<_>>(),
            vec![vec![], vec![0], vec![1], vec![2]]
        );
        assert_eq!(
            guess_sets(&inst, 2).collect::<Vec<_>>(),
            vec![vec![], vec![0], vec![0, 1], vec![0, 2], vec![1], vec![1, 2], vec![2]]
        );
        let inst = modular(vec![0.01; 10], vec![1.0; 10]);
        assert_eq!(guess_sets(&inst, 2).count(), 56);
    }

    #[test]
    fn infeasible_guesses_are_skipped() {
        let inst = modular(vec![0.6, 0.6, 0.3], vec![1.0; 3]);
        let all: Vec<_> = guess_sets(&inst, 3).collect();
        assert_eq!(all, vec![vec![], vec![0], vec![0, 2], vec![1], vec![1, 2], vec![2]]);
    }

    #[test]
    fn single_element() {
        let inst = modular(vec![0.7], vec![2.5]);
        let out = solve_randomized(&inst, &greedy(), 0.3, 1, 0, 1).unwrap();
        assert_eq!(out.solution.members(), &[0]);
        assert_eq!(out.solution.value(), 2.5);
    }

    #[test]
    fn big_element_optimum_is_recovered_by_guessing() {
        // Element 0 alone is optimal, and it is big for every reasonable eps.
        let mut costs = vec![0.9];
        let mut weights = vec![10.0];
        costs.extend(vec![0.05; 6]);
        weights.extend(vec![0.5; 6]);
        let inst = modular(costs, weights);
        let out = solve_randomized(&inst, &greedy(), 0.3, 1, 3, 4).unwrap();
        assert_eq!(out.solution.members(), &[0]);
        assert_eq!(out.best_guess, vec![0]);
        let none = solve_randomized(&inst, &greedy(), 0.3, 0, 3, 4).unwrap();
        assert!(none.solution.value() < 10.0);
    }
}
