//! Deviation-only genetic algorithm used as the single-objective baseline.
//!
//! Same initialization and operators as the NSGA-II path, but parents are
//! chosen and survivors truncated on deviation alone. MAE is computed for
//! reporting and never influences the search.

use alloc::vec::Vec;

use rand::Rng;

use crate::dataset::Dataset;
use crate::genotype::{swap_mutation, uniform_crossover};
use crate::nsga2::{EvolutionConfig, EvolutionError};
use crate::pareto::rank_population;
use crate::population::{EvolutionOutcome, GenerationStats, Individual};

/// Binary tournament on deviation; ties go to the lower index.
pub fn deviation_tournament<R: Rng + ?Sized>(population: &[Individual], rng: &mut R) -> usize {
    let a = rng.gen_range(0..population.len());
    let b = rng.gen_range(0..population.len());
    let (da, db) = (
        population[a].objectives.deviation,
        population[b].objectives.deviation,
    );
    if db < da || (db == da && b < a) {
        b
    } else {
        a
    }
}

/// `(mu + lambda)` truncation by ascending deviation, ties to lower index.
pub fn truncate_by_deviation(combined: Vec<Individual>, size: usize) -> Vec<Individual> {
    let mut order: Vec<usize> = (0..combined.len()).collect();
    order.sort_by(|&a, &b| {
        combined[a]
            .objectives
            .deviation
            .total_cmp(&combined[b].objectives.deviation)
            .then(a.cmp(&b))
    });
    order.truncate(size);
    let mut slots: Vec<Option<Individual>> = combined.into_iter().map(Some).collect();
    order
        .into_iter()
        .map(|i| slots[i].take().expect("each index is kept once"))
        .collect()
}

pub fn run_soga<R: Rng + ?Sized>(
    dataset: &Dataset,
    config: &EvolutionConfig,
    rng: &mut R,
) -> Result<EvolutionOutcome, EvolutionError> {
    let mode = config.regression_mode;
    let mut population = config.initial_population(dataset, rng)?;
    rank_population(&mut population);
    let mut history = alloc::vec![GenerationStats::of(0, &population)];
    let (children, mutants) = config.offspring_counts();

    for generation in 1..=config.iterations {
        let mut offspring = Vec::with_capacity(children + mutants);
        for _ in 0..children / 2 {
            let a = deviation_tournament(&population, rng);
            let b = deviation_tournament(&population, rng);
            let (c1, c2) = uniform_crossover(&population[a].genotype, &population[b].genotype, rng)
                .expect("population genotypes share one length");
            offspring.push(c1);
            offspring.push(c2);
        }
        for _ in 0..mutants {
            let parent = deviation_tournament(&population, rng);
            offspring.push(swap_mutation(&population[parent].genotype, rng));
        }
        let mut combined = population;
        combined.extend(
            offspring
                .into_iter()
                .map(|g| Individual::evaluate(config.prepare(g, dataset), dataset, mode)),
        );
        population = truncate_by_deviation(combined, config.population_size);
        // ranks are reporting-only here
        rank_population(&mut population);
        history.push(GenerationStats::of(generation, &population));
    }
    Ok(EvolutionOutcome {
        generations: history,
        population,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genotype::InitMethod;
    use crate::objectives::RegressionMode;
    use alloc::vec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn dataset(y_scale: f64, permute: bool) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let feats: Vec<f64> = (0..90).map(|_| rng.gen_range(0.0..10.0)).collect();
        let mut y: Vec<f64> = (0..30).map(|i| y_scale * feats[3 * i] + feats[3 * i + 2]).collect();
        if permute {
            y.reverse();
        }
        Dataset::new(feats, 3, y).unwrap()
    }

    #[test]
    fn best_deviation_never_worsens() {
        let ds = dataset(1.0, false);
        let cfg = EvolutionConfig {
            population_size: 14,
            iterations: 20,
            ..Default::default()
        };
        let out = run_soga(&ds, &cfg, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert_eq!(out.generations.len(), 21);
        assert_eq!(out.population.len(), 14);
        for w in out.generations.windows(2) {
            assert!(w[1].min_deviation <= w[0].min_deviation);
        }
        let again = run_soga(&ds, &cfg, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert_eq!(out, again);
    }

    #[test]
    fn search_ignores_the_outcome() {
        let cfg = EvolutionConfig {
            population_size: 10,
            iterations: 12,
            init_method: InitMethod::Rc,
            regression_mode: RegressionMode::Lr,
            ..Default::default()
        };
        let a = run_soga(&dataset(1.0, false), &cfg, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
        let b = run_soga(&dataset(-3.0, true), &cfg, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
        let ga: Vec<_> = a.population.iter().map(|i| i.genotype.clone()).collect();
        let gb: Vec<_> = b.population.iter().map(|i| i.genotype.clone()).collect();
        assert_eq!(ga, gb);
        assert_ne!(a.generations.last().unwrap().mean_mae, b.generations.last().unwrap().mean_mae);
    }

    #[test]
    fn truncation_prefers_lower_index_on_ties() {
        use crate::genotype::Genotype;
        use crate::objectives::ObjectiveValues;
        let mk = |d: f64, tag: usize| Individual {
            genotype: Genotype::new(vec![tag, tag]).unwrap(),
            objectives: ObjectiveValues::new(d, 0.0),
            rank: 0,
            crowding: 0.0,
            k: 1,
        };
        let kept = truncate_by_deviation(vec![mk(3.0, 0), mk(1.0, 0), mk(1.0, 1)], 2);
        assert_eq!(kept[0].genotype.alleles(), &[0, 0]);
        assert_eq!(kept[1].genotype.alleles(), &[1, 1]);
    }
}
