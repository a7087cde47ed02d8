use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::multilinear::{extension_value, has_exact_extension, sample_mask, FractionalPoint};
use crate::seed::{derive_seed, rng_from_seed};

use super::{fit_into_polytope, lp};

/// Continuous greedy for monotone objectives.
///
/// Starting from the origin, each of the `steps` rounds estimates the
/// marginal weights `w_i = E[f(R + i) - f(R)]` at the current point, picks
/// the vertex `v` of the polytope maximizing `w·v`, and moves by `v / steps`.
/// Elements left below 1 in `v` are then raised while budget remains, which
/// cannot lower `F` for a monotone `f`.
pub fn continuous_greedy(
    inst: &Instance,
    steps: usize,
    samples_per_gradient: usize,
    exact_marginals: bool,
    seed: u64,
) -> Result<FractionalPoint> {
    if !inst.is_monotone() {
        return Err(Error::Config(
            "continuous greedy requires a monotone objective; use local search instead".into(),
        ));
    }
    if steps == 0 {
        return Err(Error::Config("continuous greedy needs at least one step".into()));
    }
    let exact = exact_marginals && has_exact_extension(inst);
    if !exact && samples_per_gradient == 0 {
        return Err(Error::Config("sampled gradients need at least one sample".into()));
    }
    let n = inst.n();
    let step = 1.0 / steps as f64;
    let mut y = vec![0.0; n];
    for t in 0..steps {
        let point = FractionalPoint::new(y.clone())?;
        let weights = if exact {
            exact_weights(inst, &point)?
        } else {
            sampled_weights(inst, &point, samples_per_gradient, derive_seed(seed, t as u64))
        };
        let mut v = lp::maximize_linear(&weights, inst.cost_matrix(), inst.budget());
        saturate(inst, &mut v);
        for (yi, vi) in y.iter_mut().zip(&v) {
            *yi = (*yi + step * vi).min(1.0);
        }
    }
    fit_into_polytope(inst, y)
}

fn exact_weights(inst: &Instance, y: &FractionalPoint) -> Result<Vec<f64>> {
    let base = extension_value(inst, y)?;
    (0..inst.n())
        .map(|i| {
            if y.get(i) == 1.0 {
                return Ok(0.0);
            }
            Ok((extension_value(inst, &y.with_entry(i, 1.0)?)? - base).max(0.0))
        })
        .collect()
}

fn sampled_weights(inst: &Instance, y: &FractionalPoint, samples: usize, seed: u64) -> Vec<f64> {
    let n = inst.n();
    let mut rng = rng_from_seed(seed);
    let mut acc = vec![0.0; n];
    for _ in 0..samples {
        let mut mask = sample_mask(&mut rng, y.entries());
        let base = inst.value_mask(&mask);
        for i in 0..n {
            if mask[i] {
                continue;
            }
            mask[i] = true;
            acc[i] += inst.value_mask(&mask) - base;
            mask[i] = false;
        }
    }
    acc.into_iter().map(|a| (a / samples as f64).max(0.0)).collect()
}

/// Raises entries of `v` in index order while every budget row has room.
fn saturate(inst: &Instance, v: &mut [f64]) {
    let mut load = inst.cost_of_entries(v);
    for i in 0..v.len() {
        if v[i] >= 1.0 {
            continue;
        }
        let mut room = 1.0 - v[i];
        for (r, l) in inst.budget().iter().enumerate() {
            let c = inst.cost(r, i);
            if c > 0.0 {
                room = room.min(((l - load[r]) / c).max(0.0));
            }
        }
        if room > 0.0 {
            v[i] += room;
            for (r, ld) in load.iter_mut().enumerate() {
                *ld += room * inst.cost(r, i);
            }
        }
    }
}
