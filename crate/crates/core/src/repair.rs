//! Optional minimum-cluster-size guard.
//!
//! Tiny clusters drive both objectives towards zero (a singleton has zero
//! deviation and zero residual). When enabled, members of clusters smaller
//! than the threshold are moved to the nearest centre of a cluster that
//! meets it.

use alloc::vec::Vec;

use crate::dataset::Dataset;
use crate::genotype::{l1, Genotype, Partition};
use crate::objectives::compute_centers;

/// Returns `g` unchanged when every cluster already has `min_size` members.
pub fn enforce_min_cluster_size(g: &Genotype, dataset: &Dataset, min_size: usize) -> Genotype {
    let p = g.decode();
    if p.k() == 1 || p.members().iter().all(|m| m.len() >= min_size) {
        return g.clone();
    }
    let centers = compute_centers(&p, dataset);
    let sizes = p.sizes();
    let mut targets: Vec<usize> = (0..p.k()).filter(|&c| sizes[c] >= min_size).collect();
    if targets.is_empty() {
        let largest = (0..p.k())
            .max_by(|&a, &b| sizes[a].cmp(&sizes[b]).then(b.cmp(&a)))
            .unwrap_or(0);
        targets.push(largest);
    }
    let labels: Vec<usize> = (0..p.n())
        .map(|i| {
            let own = p.labels()[i];
            if targets.contains(&own) {
                return own;
            }
            let row = dataset.row(i);
            let mut best = (f64::INFINITY, targets[0]);
            for &t in &targets {
                let dist = l1(row, centers.center(t));
                if dist < best.0 {
                    best = (dist, t);
                }
            }
            best.1
        })
        .collect();
    let repaired = Partition::from_labels(&labels);
    let reps = representatives_near(&repaired, dataset, |c| {
        // canonical cluster c came from original cluster labels[members[c][0]]
        centers.center(labels[repaired.members()[c][0]]).to_vec()
    });
    repaired
        .encode_star(&reps)
        .expect("representatives are drawn from their own clusters")
}

/// For every cluster, the member closest (L1) to `center_of(cluster)`;
/// ties go to the lowest observation index.
pub(crate) fn representatives_near<F>(p: &Partition, dataset: &Dataset, center_of: F) -> Vec<usize>
where
    F: Fn(usize) -> Vec<f64>,
{
    p.members()
        .iter()
        .enumerate()
        .map(|(c, members)| {
            let center = center_of(c);
            let mut best = (f64::INFINITY, members[0]);
            for &i in members {
                let dist = l1(dataset.row(i), &center);
                if dist < best.0 {
                    best = (dist, i);
                }
            }
            best.1
        })
        .collect()
}
