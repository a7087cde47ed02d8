//! Maximizing a non-negative submodular set function under `d` knapsack
//! constraints.
//!
//! The pipeline: solve the continuous relaxation `max F(y), y ∈ P` with a
//! pluggable solver, round `y` randomly (or deterministically via pipage
//! steps), repair near-feasible draws, and enumerate small guessed sets so
//! that only small elements are ever rounded.

pub mod bruteforce;
pub mod continuous;
pub mod derandomize;
pub mod enumeration;
mod error;
pub mod instance;
pub mod multilinear;
pub mod oracle;
pub mod properties;
pub mod rounding;
pub mod seed;

pub use continuous::{ContinuousMethod, ContinuousSolver, ContinuousSolverConfig, SolverRegistry};
pub use error::{Error, Result};
pub use instance::{FeasibilityClass, Instance, SolutionSet};
pub use multilinear::{Estimate, FractionalPoint};
pub use oracle::{Edge, OracleKind, SubmodularOracle};
