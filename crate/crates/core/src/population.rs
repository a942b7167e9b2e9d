//! Evaluated individuals and per-generation summaries.

use alloc::vec::Vec;

use crate::dataset::Dataset;
use crate::genotype::Genotype;
use crate::objectives::{evaluate_partition, ObjectiveValues, RegressionMode};

#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub genotype: Genotype,
    pub objectives: ObjectiveValues,
    /// Front index, starting at 1. Zero until the population is sorted.
    pub rank: usize,
    /// Crowding distance within the individual's front; may be infinite.
    pub crowding: f64,
    /// Number of clusters of the decoded partition.
    pub k: usize,
}

impl Individual {
    pub fn evaluate(genotype: Genotype, dataset: &Dataset, mode: RegressionMode) -> Self {
        let partition = genotype.decode();
        let objectives = evaluate_partition(&partition, dataset, mode);
        Self {
            genotype,
            objectives,
            rank: 0,
            crowding: 0.0,
            k: partition.k(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GenerationStats {
    pub generation: usize,
    pub mean_deviation: f64,
    pub min_deviation: f64,
    pub mean_mae: f64,
    pub min_mae: f64,
    pub front1_size: usize,
}

impl GenerationStats {
    /// Summarises a ranked population.
    pub fn of(generation: usize, population: &[Individual]) -> Self {
        let n = population.len() as f64;
        let (mut sum_dev, mut sum_mae) = (0.0, 0.0);
        let (mut min_dev, mut min_mae) = (f64::INFINITY, f64::INFINITY);
        for ind in population {
            sum_dev += ind.objectives.deviation;
            sum_mae += ind.objectives.mae;
            min_dev = min_dev.min(ind.objectives.deviation);
            min_mae = min_mae.min(ind.objectives.mae);
        }
        Self {
            generation,
            mean_deviation: sum_dev / n,
            min_deviation: min_dev,
            mean_mae: sum_mae / n,
            min_mae,
            front1_size: population.iter().filter(|i| i.rank == 1).count(),
        }
    }
}

/// Trajectory plus the final ranked population of one evolutionary run.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionOutcome {
    /// One row per generation, starting with the initial population.
    pub generations: Vec<GenerationStats>,
    pub population: Vec<Individual>,
}
