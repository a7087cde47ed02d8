mod common;

use knapsub_core::continuous::{
    contains, continuous_greedy, grid_bruteforce, local_search_fractional,
};
use knapsub_core::multilinear::extension_value;
use rand::Rng;

#[test]
fn every_solver_stays_in_the_polytope() {
    let mut rng = common::rng(80);
    for k in 0..60 {
        let n = rng.gen_range(1..=8);
        let d = rng.gen_range(1..=3);
        let monotone = k % 2 == 0;
        let f = if monotone { common::coverage_oracle(&mut rng, n, 8, 0.3) } else { common::cut_oracle(&mut rng, n, 0.4, false) };
        let inst = common::instance(f, common::costs(&mut rng, d, n, 0.0, 0.7));
        if monotone {
            assert!(contains(&inst, &continuous_greedy(&inst, 25, 50, k % 4 == 0, k).unwrap()));
        }
        assert!(contains(&inst, &local_search_fractional(&inst, 4, 2, k).unwrap()));
        assert!(contains(&inst, &grid_bruteforce(&inst, 3).unwrap()));
    }
}

#[test]
fn greedy_against_grid_optimum() {
    let mut rng = common::rng(81);
    let target = 1.0 - (-1.0f64).exp() - 0.05;
    let mut good = 0;
    for _ in 0..100 {
        let n = rng.gen_range(2..=7);
        let inst = common::instance(common::coverage_oracle(&mut rng, n, 8, 0.3), common::costs(&mut rng, 1, n, 0.1, 0.6));
        let y = continuous_greedy(&inst, 100, 0, true, 0).unwrap();
        let value = extension_value(&inst, &y).unwrap();
        let grid = extension_value(&inst, &grid_bruteforce(&inst, 8).unwrap()).unwrap();
        assert!(value >= 0.5 * grid, "{value} vs grid {grid}");
        if value >= target * grid {
            good += 1;
        }
    }
    assert!(good >= 95, "{good}/100");
}

// Fails: with a coarser discretization the greedy can land on a better
// point. Run with --ignored to reproduce.
#[test]
#[ignore = "F at the greedy output is not monotone in the step count"]
fn greedy_value_grows_with_steps() {
    let mut rng = common::rng(82);
    for _ in 0..20 {
        let n = rng.gen_range(2..=8);
        let inst = common::instance(common::coverage_oracle(&mut rng, n, 8, 0.3), common::costs(&mut rng, 1, n, 0.1, 0.6));
        let mut last = f64::NEG_INFINITY;
        for steps in [5, 10, 20, 40, 80] {
            let v = extension_value(&inst, &continuous_greedy(&inst, steps, 0, true, 0).unwrap()).unwrap();
            assert!(v >= last - 1e-9, "steps {steps}: {v} < {last}");
            last = v;
        }
    }
}
