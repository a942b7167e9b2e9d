//! SGD k-medians improvement of dominated solutions.
//!
//! Each generation, every dominated individual has each of its cluster
//! centres moved one step towards a randomly sampled member, observations
//! are reassigned to the nearest updated centre, and the result is
//! re-encoded as a star genotype.

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::dataset::Dataset;
use crate::genotype::{l1, Partition};
use crate::math;
use crate::nsga2::{EvolutionConfig, EvolutionError};
use crate::objectives::{compute_centers, RegressionMode};
use crate::pareto::rank_population;
use crate::population::{EvolutionOutcome, GenerationStats, Individual};
use crate::repair::representatives_near;

/// Step-size schedule `c_gamma / (1 + c_alpha * n)^alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SgdParams {
    pub c_gamma: f64,
    pub c_alpha: f64,
    pub alpha: f64,
}

impl Default for SgdParams {
    fn default() -> Self {
        Self {
            c_gamma: 2000.0,
            c_alpha: 1.0,
            alpha: 0.75,
        }
    }
}

/// Step length for a cluster with `cluster_size` members.
pub fn learning_rate(cluster_size: usize, params: &SgdParams) -> f64 {
    params.c_gamma / math::powf(1.0 + params.c_alpha * cluster_size as f64, params.alpha)
}

/// Moves `center` a distance `step` along the Euclidean unit vector towards
/// `z`. A centre already at `z` (within 1e-12) stays put.
pub fn sgd_center_step(center: &[f64], z: &[f64], step: f64) -> Vec<f64> {
    let norm = math::sqrt(
        center
            .iter()
            .zip(z)
            .map(|(c, x)| (c - x) * (c - x))
            .sum::<f64>(),
    );
    if norm < 1e-12 {
        return center.to_vec();
    }
    center
        .iter()
        .zip(z)
        .map(|(c, x)| c - step * (c - x) / norm)
        .collect()
}

/// One SGD pass over the clusters of `individual`, followed by nearest-centre
/// reassignment and re-evaluation.
///
/// Single-cluster solutions, and solutions whose reassignment would collapse
/// to a single cluster, are returned unchanged.
pub fn improve_solution<R: Rng + ?Sized>(
    individual: &Individual,
    dataset: &Dataset,
    params: &SgdParams,
    rng: &mut R,
    mode: RegressionMode,
) -> Individual {
    let partition = individual.genotype.decode();
    if partition.k() < 2 {
        return individual.clone();
    }
    let mut centers = compute_centers(&partition, dataset);
    let mut order: Vec<usize> = (0..partition.k()).collect();
    order.shuffle(rng);
    for &r in &order {
        let members = &partition.members()[r];
        let z = members[rng.gen_range(0..members.len())];
        let step = learning_rate(members.len(), params);
        let moved = sgd_center_step(centers.center(r), dataset.row(z), step);
        centers.center_mut(r).copy_from_slice(&moved);
    }

    let raw: Vec<usize> = dataset
        .rows()
        .map(|row| {
            let mut best = (f64::INFINITY, 0);
            for c in 0..partition.k() {
                let dist = l1(row, centers.center(c));
                if dist < best.0 {
                    best = (dist, c);
                }
            }
            best.1
        })
        .collect();
    let reassigned = Partition::from_labels(&raw);
    if reassigned.k() < 2 {
        return individual.clone();
    }
    let reps = representatives_near(&reassigned, dataset, |c| {
        centers.center(raw[reassigned.members()[c][0]]).to_vec()
    });
    let genotype = reassigned
        .encode_star(&reps)
        .expect("representatives are drawn from their own clusters");
    Individual::evaluate(genotype, dataset, mode)
}

/// Step-wise driver for SGD-updated generations.
#[derive(Debug, Clone)]
pub struct SgdEvolution<'a> {
    dataset: &'a Dataset,
    config: EvolutionConfig,
    params: SgdParams,
    population: Vec<Individual>,
    history: Vec<GenerationStats>,
}

impl<'a> SgdEvolution<'a> {
    pub fn new<R: Rng + ?Sized>(
        dataset: &'a Dataset,
        config: EvolutionConfig,
        params: SgdParams,
        rng: &mut R,
    ) -> Result<Self, EvolutionError> {
        let mut population = config.initial_population(dataset, rng)?;
        rank_population(&mut population);
        let history = alloc::vec![GenerationStats::of(0, &population)];
        Ok(Self {
            dataset,
            config,
            params,
            population,
            history,
        })
    }

    pub fn population(&self) -> &[Individual] {
        &self.population
    }

    pub fn history(&self) -> &[GenerationStats] {
        &self.history
    }

    /// Non-dominated individuals are kept as they are; every dominated one is
    /// replaced by its improved version.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let next: Vec<Individual> = self
            .population
            .iter()
            .map(|ind| {
                if ind.rank == 1 {
                    ind.clone()
                } else {
                    let improved = improve_solution(
                        ind,
                        self.dataset,
                        &self.params,
                        rng,
                        self.config.regression_mode,
                    );
                    if self.config.min_cluster_size.is_none() || improved.genotype == ind.genotype {
                        improved
                    } else {
                        let g = self.config.prepare(improved.genotype, self.dataset);
                        Individual::evaluate(g, self.dataset, self.config.regression_mode)
                    }
                }
            })
            .collect();
        self.population = next;
        rank_population(&mut self.population);
        let generation = self.history.len();
        self.history
            .push(GenerationStats::of(generation, &self.population));
    }

    pub fn into_outcome(self) -> EvolutionOutcome {
        EvolutionOutcome {
            generations: self.history,
            population: self.population,
        }
    }
}

pub fn run_sgd_evolution<R: Rng + ?Sized>(
    dataset: &Dataset,
    config: &EvolutionConfig,
    params: &SgdParams,
    rng: &mut R,
) -> Result<EvolutionOutcome, EvolutionError> {
    let mut driver = SgdEvolution::new(dataset, config.clone(), *params, rng)?;
    for _ in 0..config.iterations {
        driver.step(rng);
    }
    Ok(driver.into_outcome())
}
