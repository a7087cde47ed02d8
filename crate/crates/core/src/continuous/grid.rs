use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::multilinear::{extension_value, FractionalPoint};

use super::contains;

/// Largest number of grid points the scan will visit.
pub const GRID_POINT_LIMIT: usize = 10_000_000;

/// Exact maximizer of `F` over `P ∩ {0, 1/m, ..., 1}^n`, `m = resolution`.
///
/// Points are visited in lexicographic order of their levels and the first
/// maximizer wins. Partial assignments whose cost already exceeds a budget
/// are pruned; every completed point is re-checked with the exact
/// membership test.
pub fn grid_bruteforce(inst: &Instance, resolution: u32) -> Result<FractionalPoint> {
    if !(2..=16).contains(&resolution) {
        return Err(Error::Config(format!("grid resolution 1/{resolution} must be between 1/2 and 1/16")));
    }
    let n = inst.n();
    let per_axis = resolution as usize + 1;
    let size = (0..n).try_fold(1usize, |acc, _| acc.checked_mul(per_axis).filter(|&s| s <= GRID_POINT_LIMIT));
    if size.is_none() {
        return Err(Error::Capacity {
            what: "continuous grid",
            size: (per_axis as f64).powi(n as i32).min(usize::MAX as f64) as usize,
            limit: GRID_POINT_LIMIT,
        });
    }
    let levels: Vec<f64> = (0..=resolution).map(|k| k as f64 / resolution as f64).collect();
    let mut search = Search {
        inst,
        levels: &levels,
        y: vec![0.0; n],
        load: vec![0.0; inst.d()],
        best: None,
    };
    search.visit(0)?;
    Ok(search.best.map(|(_, p)| p).unwrap_or_else(|| FractionalPoint::zeros(n)))
}

struct Search<'a> {
    inst: &'a Instance,
    levels: &'a [f64],
    y: Vec<f64>,
    load: Vec<f64>,
    best: Option<(f64, FractionalPoint)>,
}

impl Search<'_> {
    fn visit(&mut self, i: usize) -> Result<()> {
        if i == self.y.len() {
            let point = FractionalPoint::new(self.y.clone())?;
            if !contains(self.inst, &point) {
                return Ok(());
            }
            let value = extension_value(self.inst, &point)?;
            if self.best.as_ref().map_or(true, |(b, _)| value > *b) {
                self.best = Some((value, point));
            }
            return Ok(());
        }
        for &level in self.levels {
            let over = (0..self.load.len()).any(|r| {
                self.load[r] + level * self.inst.cost(r, i) > self.inst.budget()[r] + 1e-9
            });
            // Costs are non-negative, so higher levels only get worse.
            if over {
                break;
            }
            for r in 0..self.load.len() {
                self.load[r] += level * self.inst.cost(r, i);
            }
            self.y[i] = level;
            self.visit(i + 1)?;
            for r in 0..self.load.len() {
                self.load[r] -= level * self.inst.cost(r, i);
            }
        }
        self.y[i] = 0.0;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::SubmodularOracle;

    #[test]
    fn scans_single_axis() {
        let inst = Instance::new(
            vec![vec![1.0]],
            vec![0.6],
            SubmodularOracle::modular(vec![2.0]).unwrap(),
        )
        .unwrap();
        let y = grid_bruteforce(&inst, 4).unwrap();
        assert_eq!(y.entries(), &[0.5]);
        assert_eq!(extension_value(&inst, &y).unwrap(), 1.0);
    }

    #[test]
    fn zero_profit_stays_at_origin() {
        let f = SubmodularOracle::coverage(vec![vec![0], vec![0]], vec![0.0]).unwrap();
        let inst = Instance::new(vec![vec![0.5, 0.5]], vec![1.0], f).unwrap();
        let y = grid_bruteforce(&inst, 4).unwrap();
        assert_eq!(y.entries(), &[0.0, 0.0]);
    }

    #[test]
    fn result_dominates_every_grid_point() {
        let f = SubmodularOracle::coverage(vec![vec![0, 1], vec![1, 2]], vec![1.0, 2.0, 1.5]).unwrap();
        let inst = Instance::new(vec![vec![0.7, 0.6]], vec![1.0], f).unwrap();
        let y = grid_bruteforce(&inst, 4).unwrap();
        let best = extension_value(&inst, &y).unwrap();
        for a in 0..=4 {
            for b in 0..=4 {
                let p = FractionalPoint::new(vec![a as f64 / 4.0, b as f64 / 4.0]).unwrap();
                if contains(&inst, &p) {
                    assert!(extension_value(&inst, &p).unwrap() <= best);
                }
            }
        }
    }

    #[test]
    fn oversized_grid_is_a_capacity_error() {
        let inst = Instance::new(
            vec![vec![0.0; 12]],
            vec![1.0],
            SubmodularOracle::modular(vec![1.0; 12]).unwrap(),
        )
        .unwrap();
        assert!(matches!(grid_bruteforce(&inst, 4), Err(Error::Capacity { .. })));
    }
}
