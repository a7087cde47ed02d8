mod common;

use knapsub_core::multilinear::{
    delta_bounds, extension_coverage_closed, extension_estimate, extension_exact, extension_value,
    pipage_point,
};
use knapsub_core::rounding::sample_round;
use knapsub_core::FractionalPoint;
use proptest::prelude::*;
use rand::Rng;

#[test]
fn closed_form_matches_enumeration_on_coverage() {
    let mut rng = common::rng(10);
    for _ in 0..100 {
        let n = rng.gen_range(1..=12);
        let items = rng.gen_range(1..10);
        let f = common::coverage_oracle(&mut rng, n, items, 0.3);
        let inst = common::instance(f, common::costs(&mut rng, 1, n, 0.0, 0.5));
        for _ in 0..10 {
            let y = FractionalPoint::new((0..n).map(|_| rng.gen()).collect()).unwrap();
            let a = extension_coverage_closed(&inst, &y).unwrap();
            let b = extension_exact(&inst, &y).unwrap();
            assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
        }
    }
}

#[test]
fn closed_forms_match_enumeration_on_cut_and_modular() {
    let mut rng = common::rng(11);
    for k in 0..60 {
        let n = rng.gen_range(1..=10);
        let f = if k % 2 == 0 {
            common::cut_oracle(&mut rng, n, 0.4, k % 4 == 0)
        } else {
            common::modular_oracle(&mut rng, n)
        };
        let inst = common::instance(f, common::costs(&mut rng, 1, n, 0.0, 0.5));
        let y = FractionalPoint::new((0..n).map(|_| rng.gen()).collect()).unwrap();
        let a = extension_value(&inst, &y).unwrap();
        let b = extension_exact(&inst, &y).unwrap();
        assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
    }
}

#[test]
fn rounding_is_unbiased() {
    let mut rng = common::rng(12);
    let f = common::coverage_oracle(&mut rng, 8, 10, 0.3);
    let inst = common::instance(f, common::costs(&mut rng, 1, 8, 0.0, 0.2));
    let y = common::point_in_polytope(&mut rng, &inst);
    let draws = 100_000;
    let (mut sum, mut sq) = (0.0, 0.0);
    for seed in 0..draws {
        let v = sample_round(&inst, &y, seed).unwrap().value();
        sum += v;
        sq += v * v;
    }
    let mean = sum / draws as f64;
    let var = (sq / draws as f64 - mean * mean) * draws as f64 / (draws - 1) as f64;
    let stderr = (var / draws as f64).sqrt();
    let exact = extension_exact(&inst, &y).unwrap();
    assert!((mean - exact).abs() <= 4.0 * stderr, "{mean} vs {exact} (stderr {stderr})");
}

#[test]
fn estimate_is_bit_reproducible() {
    let mut rng = common::rng(13);
    let f = common::cut_oracle(&mut rng, 9, 0.5, false);
    let inst = common::instance(f, common::costs(&mut rng, 1, 9, 0.0, 0.3));
    let y = FractionalPoint::new((0..9).map(|_| rng.gen()).collect()).unwrap();
    let a = extension_estimate(&inst, &y, 500, 99).unwrap();
    let b = extension_estimate(&inst, &y, 500, 99).unwrap();
    assert_eq!(a.mean.to_bits(), b.mean.to_bits());
    assert_eq!(a.stderr.to_bits(), b.stderr.to_bits());
}

#[test]
fn modular_estimate_tracks_linear_value() {
    let mut rng = common::rng(14);
    let f = common::modular_oracle(&mut rng, 6);
    let inst = common::instance(f, common::costs(&mut rng, 1, 6, 0.0, 0.3));
    let y = FractionalPoint::new((0..6).map(|_| rng.gen()).collect()).unwrap();
    let est = extension_estimate(&inst, &y, 100_000, 3).unwrap();
    let exact = extension_value(&inst, &y).unwrap();
    assert!((est.mean - exact).abs() <= 4.0 * est.stderr);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn convex_along_pipage_directions(
        seed in any::<u64>(),
        cut in any::<bool>(),
        entries in proptest::collection::vec(0.0f64..=1.0, 7),
        i in 0usize..7,
        j in 0usize..7,
    ) {
        prop_assume!(i != j);
        let mut rng = common::rng(seed);
        let f = if cut { common::cut_oracle(&mut rng, 7, 0.4, false) } else { common::coverage_oracle(&mut rng, 7, 6, 0.35) };
        let inst = common::instance(f, common::costs(&mut rng, 1, 7, 0.0, 0.2));
        let y = FractionalPoint::new(entries).unwrap();
        let (lo, hi) = delta_bounds(&y, i, j).unwrap();
        let at = |d: f64| extension_exact(&inst, &pipage_point(&y, i, j, d).unwrap()).unwrap();
        let mid = at((lo + hi) / 2.0);
        prop_assert!(mid <= (at(lo) + at(hi)) / 2.0 + 1e-9);
        // Either endpoint is at least as good as the start.
        prop_assert!(at(lo).max(at(hi)) >= at(0.0) - 1e-9);
    }

    #[test]
    fn affine_in_each_coordinate(
        seed in any::<u64>(),
        entries in proptest::collection::vec(0.0f64..=1.0, 6),
        i in 0usize..6,
        t in 0.0f64..=1.0,
    ) {
        let mut rng = common::rng(seed);
        let inst = common::instance(common::cut_oracle(&mut rng, 6, 0.5, true), common::costs(&mut rng, 1, 6, 0.0, 0.2));
        let y = FractionalPoint::new(entries).unwrap();
        let at = |v: f64| extension_exact(&inst, &y.with_entry(i, v).unwrap()).unwrap();
        prop_assert!((at(t) - ((1.0 - t) * at(0.0) + t * at(1.0))).abs() <= 1e-9);
    }

    #[test]
    fn monotone_oracle_gives_monotone_extension(
        seed in any::<u64>(),
        entries in proptest::collection::vec(0.0f64..=1.0, 8),
        i in 0usize..8,
        bump in 0.0f64..=1.0,
    ) {
        let mut rng = common::rng(seed);
        let inst = common::instance(common::coverage_oracle(&mut rng, 8, 9, 0.3), common::costs(&mut rng, 1, 8, 0.0, 0.2));
        let y = FractionalPoint::new(entries).unwrap();
        let higher = y.with_entry(i, (y.get(i) + bump).min(1.0)).unwrap();
        prop_assert!(extension_exact(&inst, &higher).unwrap() >= extension_exact(&inst, &y).unwrap() - 1e-12);
    }
}
