//! NSGA-II with uniform crossover and swap mutation over adjacency
//! genotypes.

use alloc::vec::Vec;

use rand::Rng;

use crate::dataset::Dataset;
use crate::genotype::{
    init_population, swap_mutation, uniform_crossover, Genotype, GenotypeError, InitMethod,
};
use crate::math;
use crate::objectives::RegressionMode;
use crate::pareto::{binary_tournament, rank_population};
use crate::population::{EvolutionOutcome, GenerationStats, Individual};
use crate::repair::enforce_min_cluster_size;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvolutionError {
    #[error("population size must be at least 2, got {0}")]
    PopulationTooSmall(usize),
    #[error("{name} must be within 0..=100, got {value}")]
    PercentOutOfRange { name: &'static str, value: f64 },
    #[error(transparent)]
    Genotype(#[from] GenotypeError),
}

/// Search settings shared by the NSGA-II, SGD and single-objective drivers.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EvolutionConfig {
    pub population_size: usize,
    pub iterations: usize,
    pub crossover_pct: f64,
    pub mutation_pct: f64,
    pub regression_mode: RegressionMode,
    pub init_method: InitMethod,
    pub seed: u64,
    /// Repair partitions with clusters smaller than this. Off when `None`.
    #[cfg_attr(feature = "serde", serde(default))]
    pub min_cluster_size: Option<usize>,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        Self {
            population_size: 100,
            iterations: 100,
            crossover_pct: 90.0,
            mutation_pct: 3.0,
            regression_mode: RegressionMode::Lr,
            init_method: InitMethod::Rso,
            seed: 1,
            min_cluster_size: None,
        }
    }
}

impl EvolutionConfig {
    pub fn validate(&self) -> Result<(), EvolutionError> {
        if self.population_size < 2 {
            return Err(EvolutionError::PopulationTooSmall(self.population_size));
        }
        for (name, value) in [
            ("crossover_pct", self.crossover_pct),
            ("mutation_pct", self.mutation_pct),
        ] {
            if !(0.0..=100.0).contains(&value) {
                return Err(EvolutionError::PercentOutOfRange { name, value });
            }
        }
        Ok(())
    }

    /// `(crossover children, mutants)` produced per generation.
    ///
    /// Children come in pairs: `2 * floor(pc * P / 2)`, at least one pair
    /// when crossover is enabled. Mutants: `max(1, round(pm * P))` when
    /// mutation is enabled.
    pub fn offspring_counts(&self) -> (usize, usize) {
        let p = self.population_size as f64;
        let pairs = math::floor(self.crossover_pct / 100.0 * p / 2.0) as usize;
        let children = if self.crossover_pct > 0.0 {
            2 * pairs.max(1)
        } else {
            0
        };
        let mutants = if self.mutation_pct > 0.0 {
            (math::round(self.mutation_pct / 100.0 * p) as usize).max(1)
        } else {
            0
        };
        (children, mutants)
    }

    pub(crate) fn prepare(&self, g: Genotype, dataset: &Dataset) -> Genotype {
        match self.min_cluster_size {
            Some(min) if min > 1 => enforce_min_cluster_size(&g, dataset, min),
            _ => g,
        }
    }

    pub(crate) fn initial_population<R: Rng + ?Sized>(
        &self,
        dataset: &Dataset,
        rng: &mut R,
    ) -> Result<Vec<Individual>, EvolutionError> {
        self.validate()?;
        let genotypes = init_population(dataset, self.init_method, self.population_size, rng)?;
        Ok(genotypes
            .into_iter()
            .map(|g| Individual::evaluate(self.prepare(g, dataset), dataset, self.regression_mode))
            .collect())
    }
}

/// Crossover children from tournament-selected parent pairs followed by
/// swap mutants of tournament-selected parents. The population must be
/// ranked.
pub fn make_offspring<R: Rng + ?Sized>(
    population: &[Individual],
    config: &EvolutionConfig,
    rng: &mut R,
) -> Vec<Genotype> {
    let (children, mutants) = config.offspring_counts();
    let mut offspring = Vec::with_capacity(children + mutants);
    for _ in 0..children / 2 {
        let a = binary_tournament(population, rng);
        let b = binary_tournament(population, rng);
        let (c1, c2) = uniform_crossover(&population[a].genotype, &population[b].genotype, rng)
            .expect("population genotypes share one length");
        offspring.push(c1);
        offspring.push(c2);
    }
    for _ in 0..mutants {
        let parent = binary_tournament(population, rng);
        offspring.push(swap_mutation(&population[parent].genotype, rng));
    }
    offspring
}

/// Keeps the best `size` individuals: whole fronts in rank order, the last
/// admitted front cut by descending crowding distance (ties to the lower
/// index). The survivors are re-ranked among themselves.
pub fn environmental_selection(mut combined: Vec<Individual>, size: usize) -> Vec<Individual> {
    let fronts = rank_population(&mut combined);
    let mut chosen: Vec<usize> = Vec::with_capacity(size);
    for front in fronts {
        if chosen.len() + front.len() <= size {
            chosen.extend(front);
            if chosen.len() == size {
                break;
            }
        } else {
            let mut last = front;
            last.sort_by(|&a, &b| {
                combined[b]
                    .crowding
                    .total_cmp(&combined[a].crowding)
                    .then(a.cmp(&b))
            });
            last.truncate(size - chosen.len());
            chosen.extend(last);
            break;
        }
    }
    let mut slots: Vec<Option<Individual>> = combined.into_iter().map(Some).collect();
    let mut survivors: Vec<Individual> = chosen
        .into_iter()
        .map(|i| slots[i].take().expect("each index is chosen once"))
        .collect();
    rank_population(&mut survivors);
    survivors
}

/// Step-wise NSGA-II driver; [`run_nsga2`] runs it to completion.
#[derive(Debug, Clone)]
pub struct Nsga2<'a> {
    dataset: &'a Dataset,
    config: EvolutionConfig,
    population: Vec<Individual>,
    history: Vec<GenerationStats>,
}

impl<'a> Nsga2<'a> {
    /// Initializes and evaluates generation 0.
    pub fn new<R: Rng + ?Sized>(
        dataset: &'a Dataset,
        config: EvolutionConfig,
        rng: &mut R,
    ) -> Result<Self, EvolutionError> {
        let mut population = config.initial_population(dataset, rng)?;
        rank_population(&mut population);
        let history = alloc::vec![GenerationStats::of(0, &population)];
        Ok(Self {
            dataset,
            config,
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

    pub fn generation(&self) -> usize {
        self.history.len() - 1
    }

    /// Offspring creation, evaluation and elitist selection.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let offspring = make_offspring(&self.population, &self.config, rng);
        let mut combined = core::mem::take(&mut self.population);
        combined.extend(offspring.into_iter().map(|g| {
            Individual::evaluate(
                self.config.prepare(g, self.dataset),
                self.dataset,
                self.config.regression_mode,
            )
        }));
        self.population = environmental_selection(combined, self.config.population_size);
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

pub fn run_nsga2<R: Rng + ?Sized>(
    dataset: &Dataset,
    config: &EvolutionConfig,
    rng: &mut R,
) -> Result<EvolutionOutcome, EvolutionError> {
    let mut driver = Nsga2::new(dataset, config.clone(), rng)?;
    for _ in 0..config.iterations {
        driver.step(rng);
    }
    Ok(driver.into_outcome())
}
