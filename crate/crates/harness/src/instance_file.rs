//! The JSON instance format.
//!
//! ```json
//! {"version":1,"n":2,"d":1,"costs":[[0.5,0.3]],"budgets":[1],
//!  "oracle":{"kind":"modular","weights":[1,2]},
//!  "metadata":{"name":"tiny"}}
//! ```
//!
//! Oracle payloads by `kind`: `coverage {sets, profits}`, `cut {edges:
//! [[u,v,w],...], directed}`, `modular {weights}`, `table {values,
//! monotone?}` where `values[mask]` is the value of the set with bit pattern
//! `mask`. Costs are given in the user's units and are normalized by the
//! budgets on load.

use std::fmt;

use knapsub_core::{Edge, Instance, SubmodularOracle};
use serde::{Deserialize, Serialize};

use crate::format::canonical_json;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub version: u32,
    pub n: usize,
    pub d: usize,
    pub costs: Vec<Vec<f64>>,
    pub budgets: Vec<f64>,
    pub oracle: OracleSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<Metadata>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum OracleSpec {
    Coverage {
        sets: Vec<Vec<usize>>,
        profits: Vec<f64>,
    },
    Cut {
        edges: Vec<(usize, usize, f64)>,
        directed: bool,
    },
    Modular {
        weights: Vec<f64>,
    },
    Table {
        values: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        monotone: Option<bool>,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<String>,
}

/// A parse or validation failure, addressed by field path (`costs[0][2]`)
/// or by line and column for syntax errors.
#[derive(Debug, Clone, PartialEq)]
pub struct FormatError {
    pub path: String,
    pub message: String,
}

impl FormatError {
    fn at(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() || self.path == "." {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

impl std::error::Error for FormatError {}

fn check_reals(path: &str, values: &[f64], positive: bool) -> Result<(), FormatError> {
    for (i, &v) in values.iter().enumerate() {
        let ok = v.is_finite() && if positive { v > 0.0 } else { v >= 0.0 };
        if !ok {
            let want = if positive { "> 0" } else { ">= 0" };
            return Err(FormatError::at(format!("{path}[{i}]"), format!("{v} must be finite and {want}")));
        }
    }
    Ok(())
}

fn check_len(path: &str, got: usize, want: usize) -> Result<(), FormatError> {
    if got == want {
        Ok(())
    } else {
        Err(FormatError::at(path, format!("expected {want} entries, got {got}")))
    }
}

impl InstanceFile {
    /// Parses and validates a document.
    pub fn parse(text: &str) -> Result<Self, FormatError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let file: InstanceFile = serde_path_to_error::deserialize(de).map_err(|e| {
            // serde_json already appends "at line L column C".
            FormatError::at(e.path().to_string(), e.inner().to_string())
        })?;
        file.validate()?;
        Ok(file)
    }

    pub fn validate(&self) -> Result<(), FormatError> {
        if self.version != FORMAT_VERSION {
            return Err(FormatError::at(
                "version",
                format!("unsupported version {}, expected {FORMAT_VERSION}", self.version),
            ));
        }
        if self.d == 0 {
            return Err(FormatError::at("d", "at least one knapsack dimension is required"));
        }
        check_len("costs", self.costs.len(), self.d)?;
        for (r, row) in self.costs.iter().enumerate() {
            let path = format!("costs[{r}]");
            check_len(&path, row.len(), self.n)?;
            check_reals(&path, row, false)?;
        }
        check_len("budgets", self.budgets.len(), self.d)?;
        check_reals("budgets", &self.budgets, true)?;
        match &self.oracle {
            OracleSpec::Coverage { sets, profits } => {
                check_len("oracle.sets", sets.len(), self.n)?;
                check_reals("oracle.profits", profits, false)?;
                for (s, items) in sets.iter().enumerate() {
                    if let Some((j, v)) = items.iter().enumerate().find(|(_, &v)| v >= profits.len()) {
                        return Err(FormatError::at(
                            format!("oracle.sets[{s}][{j}]"),
                            format!("item {v} out of range, {} items exist", profits.len()),
                        ));
                    }
                }
            }
            OracleSpec::Cut { edges, .. } => {
                for (k, &(u, v, w)) in edges.iter().enumerate() {
                    if u >= self.n || v >= self.n {
                        return Err(FormatError::at(
                            format!("oracle.edges[{k}]"),
                            format!("endpoint outside 0..{}", self.n),
                        ));
                    }
                    if !w.is_finite() || w < 0.0 {
                        return Err(FormatError::at(format!("oracle.edges[{k}]"), format!("weight {w} must be >= 0")));
                    }
                }
            }
            OracleSpec::Modular { weights } => {
                check_len("oracle.weights", weights.len(), self.n)?;
                check_reals("oracle.weights", weights, false)?;
            }
            OracleSpec::Table { values, .. } => {
                if self.n > knapsub_core::oracle::TABLE_MAX_N {
                    return Err(FormatError::at(
                        "n",
                        format!("table oracles support at most {} elements", knapsub_core::oracle::TABLE_MAX_N),
                    ));
                }
                check_len("oracle.values", values.len(), 1usize << self.n)?;
                check_reals("oracle.values", values, false)?;
            }
        }
        Ok(())
    }

    pub fn oracle(&self) -> knapsub_core::Result<SubmodularOracle> {
        match &self.oracle {
            OracleSpec::Coverage { sets, profits } => SubmodularOracle::coverage(sets.clone(), profits.clone()),
            OracleSpec::Cut { edges, directed } => SubmodularOracle::cut(
                self.n,
                edges.iter().map(|&(u, v, weight)| Edge { u, v, weight }).collect(),
                *directed,
            ),
            OracleSpec::Modular { weights } => SubmodularOracle::modular(weights.clone()),
            OracleSpec::Table { values, monotone } => {
                SubmodularOracle::table(self.n, values.clone(), monotone.unwrap_or(false))
            }
        }
    }

    pub fn to_instance(&self) -> Result<Instance, FormatError> {
        let oracle = self.oracle().map_err(|e| FormatError::at("oracle", e.to_string()))?;
        Instance::new(self.costs.clone(), self.budgets.clone(), oracle).map_err(|e| FormatError::at("", e.to_string()))
    }

    /// Sorted keys, no whitespace, floats as `%.17g`.
    pub fn to_canonical_string(&self) -> String {
        canonical_json(&serde_json::to_value(self).expect("instance files serialize"))
    }

    pub fn name(&self) -> Option<&str> {
        self.metadata.as_ref()?.name.as_deref()
    }
}

/// Parses, validates and builds the instance.
pub fn parse_instance(text: &str) -> Result<(InstanceFile, Instance), FormatError> {
    let file = InstanceFile::parse(text)?;
    let inst = file.to_instance()?;
    Ok((file, inst))
}

/// Re-emits any JSON document in canonical form.
pub fn canonicalize(text: &str) -> Result<String, FormatError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| FormatError::at("", e.to_string()))?;
    Ok(canonical_json(&value))
}
