//! Outcome-guided clustering as a two-objective search problem.
//!
//! A partition of the observations is scored by its k-medians deviation and
//! by how well per-cluster (or cluster-label) regression predicts the outcome
//! variable. Partitions are encoded as locus-based adjacency genotypes and
//! searched either with NSGA-II (crossover + mutation) or with SGD k-medians
//! improvement of dominated solutions. The [`stats`] module holds the
//! ANOVA / Tukey HSD / t-test machinery used to compare model variants.
//!
//! The crate is `no_std` and only needs `alloc`. All randomness is drawn from
//! a caller-supplied [`rand::Rng`], so runs are reproducible given a seeded
//! generator.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod math;
mod unionfind;

pub mod baseline;
pub mod dataset;
pub mod genotype;
pub mod linalg;
pub mod nsga2;
pub mod objectives;
pub mod pareto;
pub mod population;
pub mod repair;
pub mod sgd;
pub mod stats;

pub use dataset::{Dataset, DatasetError, Normalization, NormalizationParams};
pub use genotype::{Genotype, GenotypeError, InitMethod, Partition};
pub use nsga2::{run_nsga2, EvolutionConfig, Nsga2};
pub use objectives::{evaluate, ObjectiveValues, RegressionMode};
pub use population::{EvolutionOutcome, GenerationStats, Individual};
pub use sgd::{run_sgd_evolution, SgdEvolution, SgdParams};
