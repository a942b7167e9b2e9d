//! Locus-based adjacency encoding of partitions.
//!
//! Gene `i` holding allele `j` links observations `i` and `j`; the clusters
//! are the connected components of the resulting undirected graph. Alleles
//! are stored 0-based; [`Genotype::from_one_based`] and
//! [`Genotype::to_one_based`] convert to the 1-based form used in reports.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::seq::index;
use rand::Rng;

use crate::dataset::Dataset;
use crate::unionfind::DisjointSet;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GenotypeError {
    #[error("allele {allele} at locus {locus} is outside 0..{n}")]
    AlleleOutOfRange { locus: usize, allele: usize, n: usize },
    #[error("genotype must have at least one gene")]
    Empty,
    #[error("parents have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("representative {representative} is not a member of cluster {cluster}")]
    RepresentativeOutsideCluster { cluster: usize, representative: usize },
    #[error("expected {expected} representatives, got {actual}")]
    RepresentativeCount { expected: usize, actual: usize },
    #[error("k = {k} is outside 2..={n}")]
    KOutOfRange { k: usize, n: usize },
    #[error("population size must be at least 1")]
    EmptyPopulation,
}

/// How the initial population is generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum InitMethod {
    /// Random observations as centres, nearest-centre assignment.
    #[cfg_attr(feature = "serde", serde(rename = "RSO"))]
    Rso,
    /// Uniformly random alleles.
    #[cfg_attr(feature = "serde", serde(rename = "RC"))]
    Rc,
}

impl fmt::Display for InitMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InitMethod::Rso => "RSO",
            InitMethod::Rc => "RC",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Genotype(Vec<usize>);

impl Genotype {
    pub fn new(alleles: Vec<usize>) -> Result<Self, GenotypeError> {
        let n = alleles.len();
        if n == 0 {
            return Err(GenotypeError::Empty);
        }
        if let Some((locus, &allele)) = alleles.iter().enumerate().find(|(_, &a)| a >= n) {
            return Err(GenotypeError::AlleleOutOfRange { locus, allele, n });
        }
        Ok(Self(alleles))
    }

    /// Builds a genotype from 1-based alleles (`1..=N`).
    pub fn from_one_based(alleles: &[usize]) -> Result<Self, GenotypeError> {
        let n = alleles.len();
        let zero_based = alleles
            .iter()
            .enumerate()
            .map(|(locus, &a)| {
                if a == 0 || a > n {
                    Err(GenotypeError::AlleleOutOfRange { locus, allele: a, n })
                } else {
                    Ok(a - 1)
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(zero_based)
    }

    /// Every observation linked to itself: `N` singleton clusters.
    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.0.iter().map(|a| a + 1).collect()
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn alleles(&self) -> &[usize] {
        &self.0
    }

    /// Exchanges the alleles at two loci.
    pub fn swap_loci(&mut self, a: usize, b: usize) {
        self.0.swap(a, b);
    }

    /// Clusters are the connected components of the graph `{i, g_i}`.
    pub fn decode(&self) -> Partition {
        let n = self.len();
        let mut set = DisjointSet::new(n);
        for (i, &j) in self.0.iter().enumerate() {
            set.union(i, j);
        }
        let roots: Vec<usize> = (0..n).map(|i| set.find(i)).collect();
        Partition::from_labels(&roots)
    }
}

/// Cluster membership with canonical labels: cluster ids follow the order of
/// each cluster's smallest member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    labels: Vec<usize>,
    members: Vec<Vec<usize>>,
}

impl Partition {
    /// Canonicalizes arbitrary labels. Label values only need to be equal
    /// within a cluster; gaps and ordering are irrelevant.
    pub fn from_labels(raw: &[usize]) -> Self {
        let mut mapping: Vec<Option<usize>> = vec![None; raw.iter().max().map_or(0, |m| m + 1)];
        let mut labels = Vec::with_capacity(raw.len());
        let mut members: Vec<Vec<usize>> = Vec::new();
        for (i, &r) in raw.iter().enumerate() {
            let id = *mapping[r].get_or_insert_with(|| {
                members.push(Vec::new());
                members.len() - 1
            });
            labels.push(id);
            members[id].push(i);
        }
        Self { labels, members }
    }

    /// Number of clusters.
    #[inline]
    pub fn k(&self) -> usize {
        self.members.len()
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.labels.len()
    }

    #[inline]
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Sorted member indices of every cluster.
    #[inline]
    pub fn members(&self) -> &[Vec<usize>] {
        &self.members
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.members.iter().map(Vec::len).collect()
    }

    /// Star encoding: each representative links to itself and every other
    /// member links to its cluster's representative.
    pub fn encode_star(&self, representatives: &[usize]) -> Result<Genotype, GenotypeError> {
        if representatives.len() != self.k() {
            return Err(GenotypeError::RepresentativeCount {
                expected: self.k(),
                actual: representatives.len(),
            });
        }
        for (cluster, &rep) in representatives.iter().enumerate() {
            if rep >= self.n() || self.labels[rep] != cluster {
                return Err(GenotypeError::RepresentativeOutsideCluster {
                    cluster,
                    representative: rep,
                });
            }
        }
        Ok(Genotype(
            self.labels.iter().map(|&c| representatives[c]).collect(),
        ))
    }
}

#[inline]
pub(crate) fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// Assigns every observation to its nearest centre observation (L1), ties to
/// the lowest centre index, and star-encodes the result. Centres always keep
/// themselves.
pub fn rso_from_centers(dataset: &Dataset, centers: &[usize]) -> Result<Genotype, GenotypeError> {
    let n = dataset.n();
    if centers.is_empty() || centers.len() > n {
        return Err(GenotypeError::KOutOfRange {
            k: centers.len(),
            n,
        });
    }
    let mut centers = centers.to_vec();
    centers.sort_unstable();
    centers.dedup();
    let mut alleles = vec![0; n];
    for i in 0..n {
        if centers.binary_search(&i).is_ok() {
            alleles[i] = i;
            continue;
        }
        let row = dataset.row(i);
        let mut best = (f64::INFINITY, centers[0]);
        for &c in &centers {
            let dist = l1(row, dataset.row(c));
            if dist < best.0 {
                best = (dist, c);
            }
        }
        alleles[i] = best.1;
    }
    Ok(Genotype(alleles))
}

/// Random-selection-of-observations initialization with `k` centres.
pub fn init_rso<R: Rng + ?Sized>(
    dataset: &Dataset,
    k: usize,
    rng: &mut R,
) -> Result<Genotype, GenotypeError> {
    let n = dataset.n();
    if k < 2 || k > n {
        return Err(GenotypeError::KOutOfRange { k, n });
    }
    let centers = index::sample(rng, n, k).into_vec();
    rso_from_centers(dataset, &centers)
}

/// Random chromosome: every allele uniform on `0..n`.
pub fn init_rc<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Genotype {
    Genotype((0..n).map(|_| rng.gen_range(0..n)).collect())
}

/// Number of centres used by the `member`-th RSO individual: cycles through
/// `2..=min(10, n)`.
pub fn rso_cluster_count(member: usize, n: usize) -> usize {
    let top = n.min(10);
    2 + member % (top - 1)
}

pub fn init_population<R: Rng + ?Sized>(
    dataset: &Dataset,
    method: InitMethod,
    size: usize,
    rng: &mut R,
) -> Result<Vec<Genotype>, GenotypeError> {
    if size == 0 {
        return Err(GenotypeError::EmptyPopulation);
    }
    let n = dataset.n();
    match method {
        InitMethod::Rso => {
            if n < 2 {
                return Err(GenotypeError::KOutOfRange { k: 2, n });
            }
            (0..size)
                .map(|m| init_rso(dataset, rso_cluster_count(m, n), rng))
                .collect()
        }
        InitMethod::Rc => Ok((0..size).map(|_| init_rc(n, rng)).collect()),
    }
}

/// Uniform crossover with an explicit mask: the first child takes `p1` where
/// the mask is `false` and `p2` where it is `true`; the second child uses the
/// complement.
pub fn crossover_with_mask(
    p1: &Genotype,
    p2: &Genotype,
    mask: &[bool],
) -> Result<(Genotype, Genotype), GenotypeError> {
    if p1.len() != p2.len() {
        return Err(GenotypeError::LengthMismatch(p1.len(), p2.len()));
    }
    if mask.len() != p1.len() {
        return Err(GenotypeError::LengthMismatch(p1.len(), mask.len()));
    }
    let (mut c1, mut c2) = (Vec::with_capacity(p1.len()), Vec::with_capacity(p1.len()));
    for ((&a, &b), &take_second) in p1.0.iter().zip(&p2.0).zip(mask) {
        if take_second {
            c1.push(b);
            c2.push(a);
        } else {
            c1.push(a);
            c2.push(b);
        }
    }
    Ok((Genotype(c1), Genotype(c2)))
}

pub fn uniform_crossover<R: Rng + ?Sized>(
    p1: &Genotype,
    p2: &Genotype,
    rng: &mut R,
) -> Result<(Genotype, Genotype), GenotypeError> {
    if p1.len() != p2.len() {
        return Err(GenotypeError::LengthMismatch(p1.len(), p2.len()));
    }
    let mask: Vec<bool> = (0..p1.len()).map(|_| rng.gen()).collect();
    crossover_with_mask(p1, p2, &mask)
}

/// Exchanges the alleles of two distinct, uniformly chosen loci.
/// Genotypes shorter than 2 are returned unchanged.
pub fn swap_mutation<R: Rng + ?Sized>(g: &Genotype, rng: &mut R) -> Genotype {
    let mut out = g.clone();
    let n = g.len();
    if n < 2 {
        return out;
    }
    let a = rng.gen_range(0..n);
    let mut b = rng.gen_range(0..n - 1);
    if b >= a {
        b += 1;
    }
    out.swap_loci(a, b);
    out
}
