//! The extension by expectation `F(y) = E[f(R)]`, `R ~ y`.
//!
//! `R ~ y` includes each element `i` independently with probability `y_i`.
//! Three evaluators are provided: exhaustive summation over the fractional
//! support, closed forms for the structured oracle kinds, and a seeded Monte
//! Carlo estimator. The pipage helpers move mass along `e_i - e_j`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::oracle::OracleKind;
use crate::seed::{rng_from_seed, SeededRng};

/// Entries this close to 0 or 1 count as integral and are snapped.
pub const INTEGRALITY_TOL: f64 = 1e-12;

/// Largest fractional support the exhaustive evaluator accepts.
pub const EXACT_SUPPORT_LIMIT: usize = 20;

/// A point of `[0,1]^n` with its fractional support cached.
#[derive(Debug, Clone, PartialEq)]
pub struct FractionalPoint {
    entries: Vec<f64>,
    support: Vec<usize>,
}

fn snap(v: f64) -> f64 {
    if v.abs() <= INTEGRALITY_TOL {
        0.0
    } else if (1.0 - v).abs() <= INTEGRALITY_TOL {
        1.0
    } else {
        v
    }
}

impl FractionalPoint {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        let mut entries = entries;
        for (i, v) in entries.iter_mut().enumerate() {
            if !v.is_finite() || *v < -INTEGRALITY_TOL || *v > 1.0 + INTEGRALITY_TOL {
                return Err(Error::invalid(format!("entry {i} = {v} is outside [0, 1]")));
            }
            *v = snap(v.clamp(0.0, 1.0));
        }
        let support = entries
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > 0.0 && v < 1.0)
            .map(|(i, _)| i)
            .collect();
        Ok(Self { entries, support })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            entries: vec![0.0; n],
            support: Vec::new(),
        }
    }

    pub fn indicator(n: usize, set: &[usize]) -> Self {
        let mut entries = vec![0.0; n];
        for &i in set {
            entries[i] = 1.0;
        }
        Self {
            entries,
            support: Vec::new(),
        }
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn get(&self, i: usize) -> f64 {
        self.entries[i]
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Indices with `0 < y_i < 1`, ascending.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn fractional_count(&self) -> usize {
        self.support.len()
    }

    pub fn is_integral(&self) -> bool {
        self.support.is_empty()
    }

    /// Indices with `y_i = 1`.
    pub fn ones(&self) -> Vec<usize> {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, &v)| v == 1.0)
            .map(|(i, _)| i)
            .collect()
    }

    /// `c * y` for `c` in `[0, 1]`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&c) {
            return Err(Error::invalid(format!("scale factor {c} is outside [0, 1]")));
        }
        Self::new(self.entries.iter().map(|v| v * c).collect())
    }

    pub fn with_entry(&self, i: usize, v: f64) -> Result<Self> {
        let mut entries = self.entries.clone();
        entries[i] = v;
        Self::new(entries)
    }
}

/// A Monte Carlo estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
}

fn check_len(inst: &Instance, y: &FractionalPoint) -> Result<()> {
    if y.len() != inst.n() {
        return Err(Error::invalid(format!(
            "point has {} entries, instance has {} elements",
            y.len(),
            inst.n()
        )));
    }
    Ok(())
}

/// `F(y)` by summing `f(R) Pr[R]` over every subset of the fractional
/// support, with integral entries fixed.
pub fn extension_exact(inst: &Instance, y: &FractionalPoint) -> Result<f64> {
    check_len(inst, y)?;
    let support = y.support();
    let s = support.len();
    if s > EXACT_SUPPORT_LIMIT {
        return Err(Error::Capacity {
            what: "fractional support for exact extension",
            size: s,
            limit: EXACT_SUPPORT_LIMIT,
        });
    }
    let mut mask: Vec<bool> = y.entries().iter().map(|&v| v == 1.0).collect();
    let mut total = 0.0;
    for bits in 0..(1usize << s) {
        let mut p = 1.0;
        for (b, &i) in support.iter().enumerate() {
            let inside = bits & (1 << b) != 0;
            mask[i] = inside;
            p *= if inside { y.get(i) } else { 1.0 - y.get(i) };
        }
        total += p * inst.value_mask(&mask);
    }
    Ok(total)
}

/// Closed form for coverage: `Σ_v p_v (1 - Π_{s ∋ v} (1 - y_s))`.
pub fn extension_coverage_closed(inst: &Instance, y: &FractionalPoint) -> Result<f64> {
    check_len(inst, y)?;
    match inst.oracle().kind() {
        OracleKind::Coverage { .. } => Ok(closed_form(inst, y.entries()).unwrap_or_default()),
        _ => Err(Error::Config(
            "closed-form coverage extension requires a coverage oracle".into(),
        )),
    }
}

fn closed_form(inst: &Instance, local: &[f64]) -> Option<f64> {
    let kind = inst.oracle().kind();
    if matches!(kind, OracleKind::Table { .. }) {
        return None;
    }
    let y = inst.oracle_point(local);
    let value = match kind {
        OracleKind::Coverage { sets, profits } => {
            let mut miss = vec![1.0; profits.len()];
            for (s, items) in sets.iter().enumerate() {
                if y[s] == 0.0 {
                    continue;
                }
                for &v in items {
                    miss[v] *= 1.0 - y[s];
                }
            }
            profits.iter().zip(&miss).map(|(p, m)| p * (1.0 - m)).sum()
        }
        OracleKind::Cut { edges, directed, .. } => edges
            .iter()
            .filter(|e| e.u != e.v)
            .map(|e| {
                let (a, b) = (y[e.u], y[e.v]);
                let p = if *directed {
                    a * (1.0 - b)
                } else {
                    a * (1.0 - b) + b * (1.0 - a)
                };
                e.weight * p
            })
            .sum(),
        OracleKind::Modular { weights } => weights.iter().zip(&y).map(|(w, v)| w * v).sum(),
        OracleKind::Table { .. } => unreachable!(),
    };
    Some(value)
}

/// Closed-form `F(y)` for coverage, cut and modular oracles; `None` for tables.
pub fn extension_closed_form(inst: &Instance, y: &FractionalPoint) -> Option<f64> {
    if y.len() != inst.n() {
        return None;
    }
    closed_form(inst, y.entries())
}

/// Whether `F` can be evaluated exactly at every point of this instance.
pub fn has_exact_extension(inst: &Instance) -> bool {
    !matches!(inst.oracle().kind(), OracleKind::Table { .. }) || inst.n() <= EXACT_SUPPORT_LIMIT
}

/// Exact `F(y)`: the closed form when the oracle has one, otherwise the
/// exhaustive sum.
pub fn extension_value(inst: &Instance, y: &FractionalPoint) -> Result<f64> {
    check_len(inst, y)?;
    match closed_form(inst, y.entries()) {
        Some(v) => Ok(v),
        None => extension_exact(inst, y),
    }
}

/// Draws `R ~ y` as a membership mask: one uniform per element, in index
/// order, element `i` included iff the draw is below `y_i`.
pub fn sample_mask(rng: &mut SeededRng, y: &[f64]) -> Vec<bool> {
    y.iter().map(|&p| rng.gen::<f64>() < p).collect()
}

/// Monte Carlo estimate of `F(y)` from `samples` independent draws.
pub fn extension_estimate(
    inst: &Instance,
    y: &FractionalPoint,
    samples: usize,
    seed: u64,
) -> Result<Estimate> {
    check_len(inst, y)?;
    if samples < 2 {
        return Err(Error::invalid(format!("at least 2 samples are required, got {samples}")));
    }
    let mut rng = rng_from_seed(seed);
    let (mut mean, mut m2) = (0.0, 0.0);
    for k in 1..=samples {
        let v = inst.value_mask(&sample_mask(&mut rng, y.entries()));
        let delta = v - mean;
        mean += delta / k as f64;
        m2 += delta * (v - mean);
    }
    let var = (m2 / (samples - 1) as f64).max(0.0);
    Ok(Estimate {
        mean,
        stderr: (var / samples as f64).sqrt(),
        samples,
    })
}

fn check_pair(y: &FractionalPoint, i: usize, j: usize) -> Result<()> {
    if i == j {
        return Err(Error::invalid("pipage direction needs two distinct elements"));
    }
    if i >= y.len() || j >= y.len() {
        return Err(Error::invalid(format!("pipage pair ({i}, {j}) out of range")));
    }
    Ok(())
}

/// The extreme `δ` keeping `y + δ e_i - δ e_j` inside the unit cube.
pub fn delta_bounds(y: &FractionalPoint, i: usize, j: usize) -> Result<(f64, f64)> {
    check_pair(y, i, j)?;
    let (yi, yj) = (y.get(i), y.get(j));
    Ok((-(yi.min(1.0 - yj)), (1.0 - yi).min(yj)))
}

/// `y + δ e_i - δ e_j`.
pub fn pipage_point(y: &FractionalPoint, i: usize, j: usize, delta: f64) -> Result<FractionalPoint> {
    let (lo, hi) = delta_bounds(y, i, j)?;
    if !(delta >= lo - INTEGRALITY_TOL && delta <= hi + INTEGRALITY_TOL) {
        return Err(Error::invalid(format!(
            "delta {delta} outside the feasible interval [{lo}, {hi}]"
        )));
    }
    let mut entries = y.entries().to_vec();
    // Land exactly on the cube boundary at the interval endpoints.
    if delta == hi {
        if hi == 1.0 - y.get(i) {
            entries[i] = 1.0;
            entries[j] = y.get(j) - delta;
        } else {
            entries[i] = y.get(i) + delta;
            entries[j] = 0.0;
        }
    } else if delta == lo {
        if -lo == y.get(i) {
            entries[i] = 0.0;
            entries[j] = y.get(j) - delta;
        } else {
            entries[i] = y.get(i) + delta;
            entries[j] = 1.0;
        }
    } else {
        entries[i] = y.get(i) + delta;
        entries[j] = y.get(j) - delta;
    }
    FractionalPoint::new(entries)
}
