use super::{ScheduleBranch, ThresholdSchedule};
use crate::divergence::{f_divergence_unchecked, pmf_from_counts, tv_unchecked, FDivergenceKind, FDivergenceSpec, Pmf};
use crate::partition::Partition;
use crate::sim::ResponseMatrix;
use crate::{Error, Result};

/// Distance decoder: connect objects whose empirical response pmfs are within
/// `γ_n`, then read clusters off the graph with [`clique_partition`].
///
/// Total variation uses `δ`; other divergences are symmetrized by taking the
/// larger of the two directions.
pub fn cluster_temp(responses: &ResponseMatrix, spec: &FDivergenceSpec, schedule: &ThresholdSchedule) -> Result<Partition> {
    let tv = spec.kind() == FDivergenceKind::TotalVariation;
    match (tv, schedule.branch()) {
        (true, ScheduleBranch::TvAlpha) | (false, ScheduleBranch::FBeta) => {}
        (_, branch) => {
            return Err(Error::InvalidSchedule(format!("{branch:?} schedule does not fit the {} divergence", spec.name())))
        }
    }
    if responses.rows() == 0 {
        return Err(Error::Empty("response matrix"));
    }
    if responses.cols() == 0 {
        return Err(Error::Empty("worker count"));
    }
    let dist = pairwise_divergences(responses, spec);
    cluster_by_divergence_matrix(&dist, schedule.gamma(responses.cols()))
}

/// Row-wise empirical pmfs.
pub(crate) fn row_pmfs(responses: &ResponseMatrix) -> Vec<Pmf> {
    (0..responses.rows())
        .map(|i| {
            let mut counts = vec![0u64; responses.alphabet_size()];
            for &s in responses.row(i) {
                counts[s as usize] += 1;
            }
            pmf_from_counts(&counts)
        })
        .collect()
}

/// Symmetric ℓ×ℓ matrix of divergences between empirical row pmfs.
pub fn pairwise_divergences(responses: &ResponseMatrix, spec: &FDivergenceSpec) -> Vec<Vec<f64>> {
    let pmfs = row_pmfs(responses);
    let ell = pmfs.len();
    let mut dist = vec![vec![0.0; ell]; ell];
    for i in 0..ell {
        for j in i + 1..ell {
            let (p, q) = (pmfs[i].mass(), pmfs[j].mass());
            let d = match spec.kind() {
                FDivergenceKind::TotalVariation => tv_unchecked(p, q),
                _ => f_divergence_unchecked(spec, p, q).max(f_divergence_unchecked(spec, q, p)),
            };
            dist[i][j] = d;
            dist[j][i] = d;
        }
    }
    dist
}

/// Threshold a divergence matrix at `gamma` (edge iff both directions are
/// `≤ gamma`) and partition the graph.
pub fn cluster_by_divergence_matrix(dist: &[Vec<f64>], gamma: f64) -> Result<Partition> {
    let ell = dist.len();
    if let Some(row) = dist.iter().find(|r| r.len() != ell) {
        return Err(Error::LengthMismatch(row.len(), ell));
    }
    let adjacency: Vec<Vec<usize>> = dist
        .iter()
        .enumerate()
        .map(|(i, row)| (0..ell).filter(|&j| i != j && row[j] <= gamma && dist[j][i] <= gamma).collect())
        .collect();
    Ok(clique_partition(&adjacency))
}

/// Partition a graph into cliques.
///
/// Each connected component that is a clique becomes one cluster. A component
/// that is not a clique is split by repeatedly removing a maximum clique
/// (ties broken by the lexicographically smallest vertex list).
pub fn clique_partition(adjacency: &[Vec<usize>]) -> Partition {
    let ell = adjacency.len();
    let adj: Vec<Bits> = adjacency
        .iter()
        .enumerate()
        .map(|(i, nbrs)| {
            let mut b = Bits::empty(ell);
            for &j in nbrs {
                if j != i && j < ell {
                    b.insert(j);
                }
            }
            b
        })
        .collect();
    // only mutual edges count
    let adj: Vec<Bits> = (0..ell)
        .map(|i| {
            let mut b = Bits::empty(ell);
            for j in adj[i].iter() {
                if adj[j].contains(i) {
                    b.insert(j);
                }
            }
            b
        })
        .collect();

    let mut clusters = Vec::new();
    let mut seen = vec![false; ell];
    for start in 0..ell {
        if seen[start] {
            continue;
        }
        let mut component = vec![start];
        seen[start] = true;
        let mut k = 0;
        while k < component.len() {
            for j in adj[component[k]].iter() {
                if !std::mem::replace(&mut seen[j], true) {
                    component.push(j);
                }
            }
            k += 1;
        }
        component.sort_unstable();
        let is_clique = component.iter().all(|&v| adj[v].count() + 1 == component.len());
        if is_clique {
            clusters.push(component);
            continue;
        }
        let mut remaining = Bits::empty(ell);
        for &v in &component {
            remaining.insert(v);
        }
        while !remaining.is_empty() {
            let clique = maximum_clique(&adj, &remaining);
            for &v in &clique {
                remaining.remove(v);
            }
            clusters.push(clique);
        }
    }
    Partition::from_clusters(ell, clusters).expect("clusters cover the vertex set")
}

/// Largest clique inside `within`, lexicographically smallest among ties.
fn maximum_clique(adj: &[Bits], within: &Bits) -> Vec<usize> {
    let mut best: Vec<usize> = Vec::new();
    let mut current = Vec::new();
    expand(adj, &mut current, within.clone(), Bits::empty(adj.len()), &mut best);
    best.sort_unstable();
    best
}

/// Bron–Kerbosch with pivoting over maximal cliques.
fn expand(adj: &[Bits], current: &mut Vec<usize>, mut candidates: Bits, mut excluded: Bits, best: &mut Vec<usize>) {
    if candidates.is_empty() {
        if excluded.is_empty() {
            let mut sorted = current.clone();
            sorted.sort_unstable();
            if sorted.len() > best.len() || (sorted.len() == best.len() && sorted < *best) {
                *best = sorted;
            }
        }
        return;
    }
    if current.len() + candidates.count() < best.len() {
        return;
    }
    let pivot = candidates
        .iter()
        .chain(excluded.iter())
        .max_by_key(|&u| (candidates.intersection_count(&adj[u]), std::cmp::Reverse(u)))
        .expect("nonempty");
    let branch: Vec<usize> = candidates.iter().filter(|&v| !adj[pivot].contains(v)).collect();
    for v in branch {
        current.push(v);
        expand(adj, current, candidates.intersect(&adj[v]), excluded.intersect(&adj[v]), best);
        current.pop();
        candidates.remove(v);
        excluded.insert(v);
    }
}

/// Fixed-width bit set over `0..len`.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn empty(len: usize) -> Self {
        Self(vec![0; len.div_ceil(64)])
    }

    fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn remove(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }

    fn contains(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn intersect(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn intersection_count(&self, other: &Self) -> usize {
        self.0.iter().zip(&other.0).map(|(a, b)| (a & b).count_ones() as usize).sum()
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(w, &word)| {
            let mut bits = word;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let tz = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(w * 64 + tz)
            })
        })
    }
}
