use rand::Rng;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::multilinear::{extension_value, FractionalPoint};
use crate::seed::{derive_seed, rng_from_seed};

use super::{contains, LOCAL_SEARCH_MIN_GAIN};

/// Grid local search for any non-negative objective.
///
/// Points live on `{0, 1/m, ..., 1}^n` with `m = resolution`. From each start
/// the search takes the best improving move until none gains more than
/// [`LOCAL_SEARCH_MIN_GAIN`]. Moves set one coordinate to any other grid
/// level, or shift one grid step of mass from one coordinate to another.
/// Start 0 is the origin; the others are random feasible grid points.
pub fn local_search_fractional(
    inst: &Instance,
    resolution: u32,
    restarts: usize,
    seed: u64,
) -> Result<FractionalPoint> {
    if !(2..=16).contains(&resolution) {
        return Err(Error::Config(format!("grid resolution 1/{resolution} must be between 1/2 and 1/16")));
    }
    if restarts == 0 {
        return Err(Error::Config("local search needs at least one start".into()));
    }
    let mut best: Option<(f64, FractionalPoint)> = None;
    for r in 0..restarts {
        let start = if r == 0 {
            vec![0; inst.n()]
        } else {
            random_start(inst, resolution, derive_seed(seed, r as u64))?
        };
        let (value, point) = climb(inst, resolution, start)?;
        if best.as_ref().map_or(true, |(b, _)| value > *b) {
            best = Some((value, point));
        }
    }
    Ok(best.expect("at least one restart").1)
}

fn to_point(levels: &[u32], m: u32) -> Result<FractionalPoint> {
    FractionalPoint::new(levels.iter().map(|&k| k as f64 / m as f64).collect())
}

fn random_start(inst: &Instance, m: u32, seed: u64) -> Result<Vec<u32>> {
    let mut rng = rng_from_seed(seed);
    let mut levels: Vec<u32> = (0..inst.n()).map(|_| rng.gen_range(0..=m)).collect();
    while !contains(inst, &to_point(&levels, m)?) {
        let positive: Vec<usize> = (0..levels.len()).filter(|&i| levels[i] > 0).collect();
        let i = positive[rng.gen_range(0..positive.len())];
        levels[i] -= 1;
    }
    Ok(levels)
}

fn climb(inst: &Instance, m: u32, mut levels: Vec<u32>) -> Result<(f64, FractionalPoint)> {
    let n = levels.len();
    let mut current = extension_value(inst, &to_point(&levels, m)?)?;
    loop {
        let mut best_gain = LOCAL_SEARCH_MIN_GAIN;
        let mut best_move: Option<Vec<u32>> = None;
        let mut consider = |cand: Vec<u32>| -> Result<()> {
            let point = to_point(&cand, m)?;
            if !contains(inst, &point) {
                return Ok(());
            }
            let gain = extension_value(inst, &point)? - current;
            if gain > best_gain {
                best_gain = gain;
                best_move = Some(cand);
            }
            Ok(())
        };
        for i in 0..n {
            for k in (0..=m).filter(|&k| k != levels[i]) {
                let mut cand = levels.clone();
                cand[i] = k;
                consider(cand)?;
            }
        }
        for i in 0..n {
            for j in (0..n).filter(|&j| j != i) {
                if levels[i] < m && levels[j] > 0 {
                    let mut cand = levels.clone();
                    cand[i] += 1;
                    cand[j] -= 1;
                    consider(cand)?;
                }
            }
        }
        match best_move {
            Some(next) => {
                levels = next;
                current += best_gain;
            }
            None => break,
        }
    }
    let point = to_point(&levels, m)?;
    Ok((extension_value(inst, &point)?, point))
}
