mod common;

use knapsub_core::properties::{check_all, check_monotonicity, DEFAULT_TOLERANCE};
use knapsub_core::{FeasibilityClass, SubmodularOracle};
use proptest::prelude::*;

const TRIALS: usize = 10_000;

#[test]
fn coverage_inequalities_hold() {
    let mut rng = common::rng(1);
    for k in 0..5 {
        let f = common::coverage_oracle(&mut rng, 14, 20, 0.2);
        for r in check_all(&f, TRIALS, k, DEFAULT_TOLERANCE) {
            assert!(r.passed(), "{r:?}");
        }
    }
}

#[test]
fn cut_inequalities_hold() {
    let mut rng = common::rng(2);
    for (k, directed) in [(0, false), (1, true), (2, false)] {
        let f = common::cut_oracle(&mut rng, 12, 0.3, directed);
        let reports = check_all(&f, TRIALS, k, DEFAULT_TOLERANCE);
        assert_eq!(reports.len(), 4, "cuts are not checked for monotonicity");
        for r in reports {
            assert!(r.passed(), "{r:?}");
        }
    }
}

#[test]
fn modular_and_table_inequalities_hold() {
    let mut rng = common::rng(3);
    let f = common::modular_oracle(&mut rng, 15);
    for r in check_all(&f, TRIALS, 7, DEFAULT_TOLERANCE) {
        assert!(r.passed(), "{r:?}");
    }
    // A table built from a coverage function.
    let cov = common::coverage_oracle(&mut rng, 10, 12, 0.25);
    let values: Vec<f64> = (0..1usize << 10)
        .map(|m| cov.eval_mask(&(0..10).map(|i| m >> i & 1 == 1).collect::<Vec<_>>()))
        .collect();
    let table = SubmodularOracle::table(10, values, true).unwrap();
    for r in check_all(&table, TRIALS, 8, DEFAULT_TOLERANCE) {
        assert!(r.passed(), "{r:?}");
    }
}

#[test]
fn monotone_oracles_are_monotone() {
    let mut rng = common::rng(4);
    let f = common::coverage_oracle(&mut rng, 16, 25, 0.15);
    assert!(check_monotonicity(&f, TRIALS, 1, DEFAULT_TOLERANCE).passed());
}

#[test]
fn table_construction_rejects_bad_tables() {
    // Supermodular.
    assert!(SubmodularOracle::table(2, vec![0.0, 1.0, 1.0, 3.0], false).is_err());
    // Submodular but declared monotone while decreasing.
    assert!(SubmodularOracle::table(1, vec![1.0, 0.5], true).is_err());
    assert!(SubmodularOracle::table(1, vec![1.0, 0.5], false).is_ok());
    assert!(SubmodularOracle::table(1, vec![-1.0, 0.5], false).is_err());
    assert!(SubmodularOracle::table(21, vec![], false).unwrap_err().is_capacity());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn coverage_submodular_on_arbitrary_pairs(
        seed in any::<u64>(),
        a in proptest::collection::vec(any::<bool>(), 10),
        b in proptest::collection::vec(any::<bool>(), 10),
    ) {
        let mut rng = common::rng(seed);
        let f = common::coverage_oracle(&mut rng, 10, 8, 0.3);
        let or: Vec<bool> = a.iter().zip(&b).map(|(x, y)| *x || *y).collect();
        let and: Vec<bool> = a.iter().zip(&b).map(|(x, y)| *x && *y).collect();
        prop_assert!(f.eval_mask(&a) + f.eval_mask(&b) >= f.eval_mask(&or) + f.eval_mask(&and) - 1e-9);
    }

    #[test]
    fn near_feasibility_is_monotone_in_eps(
        seed in any::<u64>(),
        e1 in 0.01f64..0.5,
        extra in 0.0f64..0.5,
    ) {
        let mut rng = common::rng(seed);
        let inst = common::instance(common::modular_oracle(&mut rng, 8), common::costs(&mut rng, 2, 8, 0.0, 0.4));
        let s = common::subset(&mut rng, 8, 0.5);
        let c1 = inst.classify(&s, e1).unwrap();
        let c2 = inst.classify(&s, e1 + extra).unwrap();
        if let FeasibilityClass::NearlyFeasible(_) = c1 {
            prop_assert!(matches!(c2, FeasibilityClass::NearlyFeasible(_)));
        }
        if c1 == FeasibilityClass::Feasible {
            prop_assert_eq!(c2, FeasibilityClass::Feasible);
        }
    }
}
