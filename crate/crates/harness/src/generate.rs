//! Seeded random instance generators.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::instance_file::{InstanceFile, Metadata, OracleSpec, FORMAT_VERSION};

/// The objective family and its shape parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Family {
    /// `sets` elements, each covering every one of `items` items with
    /// probability `density`; item profits uniform in `profit`.
    Coverage {
        sets: usize,
        items: usize,
        density: f64,
        profit: [f64; 2],
    },
    /// A graph cut over `vertices` elements; each pair (ordered if
    /// `directed`) is an edge with probability `edge_prob`.
    Cut {
        vertices: usize,
        edge_prob: f64,
        weight: [f64; 2],
        directed: bool,
    },
    Modular { n: usize, weight: [f64; 2] },
}

/// Costs are uniform in `range` with budgets 1. With `small_eps` set they are
/// uniform in `[0, small_eps^3]` instead, so every element is small.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostModel {
    pub d: usize,
    #[serde(default = "CostModel::default_range")]
    pub range: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub small_eps: Option<f64>,
}

impl CostModel {
    fn default_range() -> [f64; 2] {
        [0.0, 0.5]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenSpec {
    pub family: Family,
    pub costs: CostModel,
}

fn check_range(name: &str, r: [f64; 2]) -> Result<(), String> {
    if r[0].is_finite() && r[1].is_finite() && 0.0 <= r[0] && r[0] <= r[1] {
        Ok(())
    } else {
        Err(format!("{name} range [{}, {}] must satisfy 0 <= lo <= hi", r[0], r[1]))
    }
}

fn check_prob(name: &str, p: f64) -> Result<(), String> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(format!("{name} {p} must lie in [0, 1]"))
    }
}

impl GenSpec {
    pub fn n(&self) -> usize {
        match self.family {
            Family::Coverage { sets, .. } => sets,
            Family::Cut { vertices, .. } => vertices,
            Family::Modular { n, .. } => n,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        match &self.family {
            Family::Coverage { density, profit, .. } => {
                check_prob("density", *density)?;
                check_range("profit", *profit)?;
            }
            Family::Cut { edge_prob, weight, .. } => {
                check_prob("edge_prob", *edge_prob)?;
                check_range("weight", *weight)?;
            }
            Family::Modular { weight, .. } => check_range("weight", *weight)?,
        }
        if self.costs.d == 0 {
            return Err("d must be at least 1".into());
        }
        check_range("cost", self.costs.range)?;
        if let Some(e) = self.costs.small_eps {
            if !(e > 0.0 && e < 1.0) {
                return Err(format!("small-element epsilon {e} must lie in (0, 1)"));
            }
        }
        Ok(())
    }

    fn kind(&self) -> &'static str {
        match self.family {
            Family::Coverage { .. } => "coverage",
            Family::Cut { .. } => "cut",
            Family::Modular { .. } => "modular",
        }
    }
}

fn uniform(rng: &mut ChaCha8Rng, r: [f64; 2]) -> f64 {
    r[0] + (r[1] - r[0]) * rng.gen::<f64>()
}

/// Draws an instance. The same spec and seed always give the same file.
pub fn generate(spec: &GenSpec, seed: u64, name: Option<String>) -> Result<InstanceFile, String> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = spec.n();
    let oracle = match &spec.family {
        &Family::Coverage {
            sets,
            items,
            density,
            profit,
        } => {
            let sets = (0..sets)
                .map(|_| (0..items).filter(|_| rng.gen::<f64>() < density).collect())
                .collect();
            let profits = (0..items).map(|_| uniform(&mut rng, profit)).collect();
            OracleSpec::Coverage { sets, profits }
        }
        &Family::Cut {
            vertices,
            edge_prob,
            weight,
            directed,
        } => {
            let mut edges = Vec::new();
            for u in 0..vertices {
                let from = if directed { 0 } else { u + 1 };
                for v in from..vertices {
                    if u != v && rng.gen::<f64>() < edge_prob {
                        edges.push((u, v, uniform(&mut rng, weight)));
                    }
                }
            }
            OracleSpec::Cut { edges, directed }
        }
        &Family::Modular { n, weight } => OracleSpec::Modular {
            weights: (0..n).map(|_| uniform(&mut rng, weight)).collect(),
        },
    };
    let range = match spec.costs.small_eps {
        Some(e) => [0.0, e.powi(3)],
        None => spec.costs.range,
    };
    let costs = (0..spec.costs.d)
        .map(|_| (0..n).map(|_| uniform(&mut rng, range).min(range[1])).collect())
        .collect();
    let file = InstanceFile {
        version: FORMAT_VERSION,
        n,
        d: spec.costs.d,
        costs,
        budgets: vec![1.0; spec.costs.d],
        oracle,
        metadata: Some(Metadata {
            name,
            seed: Some(seed),
            generator: Some(spec.kind().to_string()),
        }),
    };
    file.validate().map_err(|e| e.to_string())?;
    Ok(file)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coverage(sets: usize, items: usize, density: f64) -> GenSpec {
        GenSpec {
            family: Family::Coverage {
                sets,
                items,
                density,
                profit: [1.0, 2.0],
            },
            costs: CostModel {
                d: 1,
                range: [0.1, 0.4],
                small_eps: None,
            },
        }
    }

    #[test]
    fn coverage_shape() {
        let f = generate(&coverage(4, 6, 0.5), 7, None).unwrap();
        assert_eq!(f.n, 4);
        let OracleSpec::Coverage { sets, profits } = &f.oracle else {
            panic!("expected coverage")
        };
        assert_eq!((sets.len(), profits.len()), (4, 6));
        assert!(sets.iter().flatten().all(|&v| v < 6));
        assert!(f.costs[0].iter().all(|&c| (0.1..=0.4).contains(&c)));
    }

    #[test]
    fn same_seed_same_bytes() {
        let spec = coverage(5, 8, 0.3);
        let a = generate(&spec, 11, Some("x".into())).unwrap().to_canonical_string();
        let b = generate(&spec, 11, Some("x".into())).unwrap().to_canonical_string();
        assert_eq!(a, b);
        assert_ne!(a, generate(&spec, 12, Some("x".into())).unwrap().to_canonical_string());
    }

    #[test]
    fn rejects_bad_params() {
        assert!(generate(&coverage(3, 3, 1.5), 0, None).is_err());
        let mut spec = coverage(3, 3, 0.5);
        spec.costs.range = [0.5, 0.1];
        assert!(generate(&spec, 0, None).is_err());
        spec.costs.range = [0.1, 0.5];
        spec.costs.d = 0;
        assert!(generate(&spec, 0, None).is_err());
    }

    #[test]
    fn undirected_cut_has_no_self_loops_or_duplicates() {
        let spec = GenSpec {
            family: Family::Cut {
                vertices: 6,
                edge_prob: 1.0,
                weight: [1.0, 1.0],
                directed: false,
            },
            costs: CostModel {
                d: 2,
                range: [0.0, 0.5],
                small_eps: None,
            },
        };
        let f = generate(&spec, 3, None).unwrap();
        let OracleSpec::Cut { edges, .. } = &f.oracle else {
            panic!("expected cut")
        };
        assert_eq!(edges.len(), 15);
        assert!(edges.iter().all(|&(u, v, _)| u < v));
    }
}
