//! Pareto machinery for two minimised objectives: non-dominated sorting,
//! crowding distance and crowded binary tournaments.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use rand::Rng;

use crate::objectives::ObjectiveValues;
use crate::population::Individual;

/// `a` is no worse than `b` in both objectives and strictly better in one.
#[inline]
pub fn dominates(a: &ObjectiveValues, b: &ObjectiveValues) -> bool {
    a.deviation <= b.deviation
        && a.mae <= b.mae
        && (a.deviation < b.deviation || a.mae < b.mae)
}

/// Splits the indices `0..objectives.len()` into successive non-dominated
/// fronts. Indices inside a front are ascending.
pub fn fast_nondominated_sort(objectives: &[ObjectiveValues]) -> Vec<Vec<usize>> {
    let n = objectives.len();
    let mut dominated_by_me: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut domination_count = vec![0usize; n];
    for i in 0..n {
        for j in i + 1..n {
            if dominates(&objectives[i], &objectives[j]) {
                dominated_by_me[i].push(j);
                domination_count[j] += 1;
            } else if dominates(&objectives[j], &objectives[i]) {
                dominated_by_me[j].push(i);
                domination_count[i] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| domination_count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominated_by_me[i] {
                domination_count[j] -= 1;
                if domination_count[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(core::mem::take(&mut current));
        current = next;
    }
    fronts
}

/// Range-normalised crowding distance of each member of `front`, returned in
/// the order of `front`. Boundary solutions of either objective are infinite;
/// an objective with zero range adds nothing to interior members.
pub fn crowding_distance(front: &[usize], objectives: &[ObjectiveValues]) -> Vec<f64> {
    let len = front.len();
    let mut distance = vec![0.0; len];
    if len <= 2 {
        distance.fill(f64::INFINITY);
        return distance;
    }
    let mut order: Vec<usize> = (0..len).collect();
    for m in 0..2 {
        let value = |slot: usize| objectives[front[slot]].as_array()[m];
        order.sort_by(|&a, &b| value(a).total_cmp(&value(b)).then(front[a].cmp(&front[b])));
        let lo = value(order[0]);
        let hi = value(order[len - 1]);
        distance[order[0]] = f64::INFINITY;
        distance[order[len - 1]] = f64::INFINITY;
        let range = hi - lo;
        if range <= 0.0 {
            continue;
        }
        for w in 1..len - 1 {
            let slot = order[w];
            distance[slot] += (value(order[w + 1]) - value(order[w - 1])) / range;
        }
    }
    distance
}

/// Sorts the population in place of its metadata: writes `rank` and
/// `crowding` on every individual and returns the fronts.
pub fn rank_population(population: &mut [Individual]) -> Vec<Vec<usize>> {
    let objectives: Vec<ObjectiveValues> = population.iter().map(|i| i.objectives).collect();
    let fronts = fast_nondominated_sort(&objectives);
    for (f, front) in fronts.iter().enumerate() {
        let crowding = crowding_distance(front, &objectives);
        for (&i, c) in front.iter().zip(crowding) {
            population[i].rank = f + 1;
            population[i].crowding = c;
        }
    }
    fronts
}

/// Crowded comparison: lower rank first, then larger crowding, then lower
/// index.
pub fn crowded_order(population: &[Individual], a: usize, b: usize) -> Ordering {
    let (x, y) = (&population[a], &population[b]);
    x.rank
        .cmp(&y.rank)
        .then_with(|| y.crowding.total_cmp(&x.crowding))
        .then(a.cmp(&b))
}

/// Draws two contestants uniformly with replacement and returns the index of
/// the crowded-comparison winner.
pub fn binary_tournament<R: Rng + ?Sized>(population: &[Individual], rng: &mut R) -> usize {
    let a = rng.gen_range(0..population.len());
    let b = rng.gen_range(0..population.len());
    tournament_winner(population, a, b)
}

pub fn tournament_winner(population: &[Individual], a: usize, b: usize) -> usize {
    match crowded_order(population, a, b) {
        Ordering::Greater => b,
        _ => a,
    }
}
