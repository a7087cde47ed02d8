#![allow(dead_code)]

use knapsub_core::{Edge, FractionalPoint, Instance, SubmodularOracle};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn coverage_oracle(rng: &mut ChaCha8Rng, n: usize, items: usize, density: f64) -> SubmodularOracle {
    let sets = (0..n)
        .map(|_| (0..items).filter(|_| rng.gen::<f64>() < density).collect())
        .collect();
    let profits = (0..items).map(|_| rng.gen_range(0.1..3.0)).collect();
    SubmodularOracle::coverage(sets, profits).unwrap()
}

pub fn cut_oracle(rng: &mut ChaCha8Rng, n: usize, p: f64, directed: bool) -> SubmodularOracle {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u != v && (directed || u < v) && rng.gen::<f64>() < p {
                edges.push(Edge { u, v, weight: rng.gen_range(0.1..2.0) });
            }
        }
    }
    SubmodularOracle::cut(n, edges, directed).unwrap()
}

pub fn modular_oracle(rng: &mut ChaCha8Rng, n: usize) -> SubmodularOracle {
    SubmodularOracle::modular((0..n).map(|_| rng.gen_range(0.0..2.0)).collect()).unwrap()
}

pub fn costs(rng: &mut ChaCha8Rng, d: usize, n: usize, lo: f64, hi: f64) -> Vec<Vec<f64>> {
    (0..d).map(|_| (0..n).map(|_| rng.gen_range(lo..=hi)).collect()).collect()
}

pub fn instance(oracle: SubmodularOracle, costs: Vec<Vec<f64>>) -> Instance {
    let d = costs.len();
    Instance::new(costs, vec![1.0; d], oracle).unwrap()
}

/// A random point of the polytope, pushed onto its boundary in some dimension.
pub fn point_in_polytope(rng: &mut ChaCha8Rng, inst: &Instance) -> FractionalPoint {
    let raw: Vec<f64> = (0..inst.n()).map(|_| rng.gen::<f64>()).collect();
    let load = inst.cost_of_entries(&raw);
    let worst = load.iter().cloned().fold(0.0, f64::max);
    let scale = if worst > 1.0 { (1.0 / worst) * (1.0 - 1e-9) } else { 1.0 };
    let y = FractionalPoint::new(raw.iter().map(|v| v * scale).collect()).unwrap();
    assert!(knapsub_core::continuous::contains(inst, &y));
    y
}

/// A random subset as a sorted index list.
pub fn subset(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Vec<usize> {
    (0..n).filter(|_| rng.gen::<f64>() < p).collect()
}
