mod common;

use std::sync::Arc;

use knapsub_core::continuous::{ContinuousMethod, MethodSolver};
use knapsub_core::enumeration::{guess_sets, residual, solve_randomized};
use knapsub_core::{ContinuousSolver, Error, FractionalPoint, Instance, SolverRegistry};
use rand::Rng;

fn greedy(steps: usize) -> MethodSolver {
    MethodSolver::new(
        "cg",
        ContinuousMethod::ContinuousGreedy { steps, samples_per_gradient: 0, exact_marginals: true },
    )
    .unwrap()
}

#[test]
fn lifted_residual_solutions_stay_feasible() {
    let mut rng = common::rng(30);
    let mut checked = 0;
    while checked < 10_000 {
        let n = rng.gen_range(2..=14);
        let d = rng.gen_range(1..=3);
        let inst = common::instance(common::modular_oracle(&mut rng, n), common::costs(&mut rng, d, n, 0.0, 0.5));
        let eps = rng.gen_range(0.2..0.9);
        let t = common::subset(&mut rng, n, 0.25);
        if !inst.is_feasible(&t).unwrap() {
            continue;
        }
        let res = residual(&inst, &t, eps).unwrap();
        let local = res.instance();
        assert!((0..local.n()).all(|i| local.is_small(i, eps)));
        for &g in &res.local_guessed() {
            assert!((0..d).all(|r| local.cost(r, g) == 0.0));
        }
        for _ in 0..20 {
            let p: f64 = rng.gen();
            let s = common::subset(&mut rng, local.n(), p);
            if !local.is_feasible(&s).unwrap() {
                continue;
            }
            let mut with_t = res.lift(&s);
            with_t.extend(t.iter().copied());
            with_t.sort_unstable();
            with_t.dedup();
            assert!(inst.is_feasible(&with_t).unwrap(), "T={t:?} S={s:?}");
            checked += 1;
        }
    }
}

#[test]
fn randomized_solve_dominates_bare_guesses_and_grows_with_h() {
    let mut rng = common::rng(31);
    for k in 0..15 {
        let n = rng.gen_range(3..=9);
        let inst = common::instance(common::coverage_oracle(&mut rng, n, 10, 0.3), common::costs(&mut rng, 1, n, 0.05, 0.6));
        let mut last = f64::NEG_INFINITY;
        for h in 0..=2 {
            let out = solve_randomized(&inst, &greedy(20), 0.3, h, k, 2).unwrap();
            assert!(out.solution.is_feasible(&inst));
            let best_bare = guess_sets(&inst, h).map(|t| inst.value(&t).unwrap()).fold(0.0, f64::max);
            assert!(out.solution.value() >= best_bare);
            assert!(out.solution.value() >= last);
            last = out.solution.value();
        }
    }
}

struct Failing;

impl ContinuousSolver for Failing {
    fn name(&self) -> &str {
        "failing"
    }

    fn solve(&self, inst: &Instance, _seed: u64) -> knapsub_core::Result<FractionalPoint> {
        if inst.n() == 3 {
            Err(Error::Config("refusing three-element residuals".into()))
        } else {
            Ok(FractionalPoint::zeros(inst.n()))
        }
    }
}

#[test]
fn solver_errors_name_the_guess() {
    let inst = common::instance(common::modular_oracle(&mut common::rng(32), 4), vec![vec![0.5, 0.5, 0.01, 0.01]]);
    match solve_randomized(&inst, &Failing, 0.3, 1, 0, 1) {
        Err(Error::Solver { guess, source }) => {
            assert_eq!(guess, vec![0]);
            assert!(matches!(*source, Error::Config(_)));
        }
        other => panic!("expected a solver error, got {other:?}"),
    }
}

#[test]
fn plugged_in_solvers_are_looked_up_by_name() {
    let mut reg = SolverRegistry::with_defaults();
    reg.register(Arc::new(Failing));
    assert_eq!(reg.get("failing").unwrap().name(), "failing");
    let inst = common::instance(common::modular_oracle(&mut common::rng(33), 5), vec![vec![0.01; 5]]);
    let out = solve_randomized(&inst, reg.get("failing").unwrap().as_ref(), 0.3, 0, 0, 1).unwrap();
    assert!(out.solution.is_empty());
}
