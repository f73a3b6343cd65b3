//! Objects, labels and partitions of `[ℓ]`.
//!
//! A [`Partition`] is kept in canonical form: every cluster is sorted and the
//! clusters are ordered by their minimum element, so structural equality is
//! set-of-sets equality.

use std::collections::HashMap;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

/// Label alphabet `[τ]` plus the null response ξ (encoded as symbol `0`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelAlphabet {
    tau: usize,
}

impl LabelAlphabet {
    pub const NULL_SYMBOL: u8 = 0;

    pub fn new(tau: usize) -> Result<Self> {
        if tau == 0 || tau >= u8::MAX as usize {
            return Err(Error::OutOfRange { value: tau as f64, range: "1..=254 classes" });
        }
        Ok(Self { tau })
    }

    pub fn tau(&self) -> usize {
        self.tau
    }

    /// Size of the response alphabet, `τ + 1`.
    pub fn response_size(&self) -> usize {
        self.tau + 1
    }
}

/// The latent labels `T_1..T_ℓ`, each in `1..=τ`, with an optional prior.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectSequence {
    alphabet: LabelAlphabet,
    labels: Vec<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    prior: Option<Vec<f64>>,
}

impl ObjectSequence {
    pub fn new(tau: usize, labels: Vec<u8>) -> Result<Self> {
        let alphabet = LabelAlphabet::new(tau)?;
        if let Some(&bad) = labels.iter().find(|&&t| t == 0 || t as usize > tau) {
            return Err(Error::LabelOutOfRange { label: bad, tau });
        }
        Ok(Self { alphabet, labels, prior: None })
    }

    pub fn with_prior(mut self, prior: Vec<f64>) -> Result<Self> {
        if prior.len() != self.alphabet.tau() {
            return Err(Error::LengthMismatch(prior.len(), self.alphabet.tau()));
        }
        if let Some(&m) = prior.iter().find(|&&m| m < 0.0) {
            return Err(Error::NegativeMass(m));
        }
        let total: f64 = prior.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized(total));
        }
        self.prior = Some(prior);
        Ok(self)
    }

    pub fn alphabet(&self) -> LabelAlphabet {
        self.alphabet
    }

    pub fn tau(&self) -> usize {
        self.alphabet.tau()
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn prior(&self) -> Option<&[f64]> {
        self.prior.as_deref()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// The sequence reordered so that position `p` holds object `order[p]`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        check_permutation(order, self.len())?;
        Ok(Self {
            alphabet: self.alphabet,
            labels: order.iter().map(|&o| self.labels[o]).collect(),
            prior: self.prior.clone(),
        })
    }
}

pub(crate) fn check_permutation(order: &[usize], len: usize) -> Result<()> {
    if order.len() != len {
        return Err(Error::InvalidPermutation(order.len()));
    }
    let mut seen = vec![false; len];
    for &o in order {
        if o >= len || std::mem::replace(&mut seen[o], true) {
            return Err(Error::InvalidPermutation(len));
        }
    }
    Ok(())
}

/// A set of nonempty, disjoint clusters covering `0..ℓ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    ground: usize,
    clusters: Vec<Vec<usize>>,
}

impl Partition {
    /// Build from 0-based clusters; validates disjointness and cover.
    pub fn from_clusters(ground: usize, clusters: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; ground];
        for cluster in &clusters {
            if cluster.is_empty() {
                return Err(Error::InvalidPartition("empty cluster".into()));
            }
            for &i in cluster {
                if i >= ground {
                    return Err(Error::InvalidPartition(format!("index {i} outside 0..{ground}")));
                }
                if std::mem::replace(&mut seen[i], true) {
                    return Err(Error::InvalidPartition(format!("index {i} appears twice")));
                }
            }
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidPartition(format!("index {missing} not covered")));
        }
        Ok(Self::canonical(ground, clusters))
    }

    /// Build from 1-based clusters, the notation used in JSON and examples.
    pub fn from_one_based(ground: usize, clusters: &[&[usize]]) -> Result<Self> {
        let zero_based = clusters
            .iter()
            .map(|c| {
                c.iter()
                    .map(|&i| i.checked_sub(1).ok_or_else(|| Error::InvalidPartition("index 0 in 1-based input".into())))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_clusters(ground, zero_based)
    }

    /// Group `0..ground` by a key per element. Keys need only be comparable.
    pub fn from_keys<K: std::hash::Hash + Eq>(keys: &[K]) -> Self {
        let mut index: HashMap<&K, usize> = HashMap::new();
        let mut clusters: Vec<Vec<usize>> = Vec::new();
        for (i, k) in keys.iter().enumerate() {
            let slot = *index.entry(k).or_insert_with(|| {
                clusters.push(Vec::new());
                clusters.len() - 1
            });
            clusters[slot].push(i);
        }
        Self::canonical(keys.len(), clusters)
    }

    pub fn singletons(ground: usize) -> Self {
        Self { ground, clusters: (0..ground).map(|i| vec![i]).collect() }
    }

    pub fn whole(ground: usize) -> Self {
        let clusters = if ground == 0 { Vec::new() } else { vec![(0..ground).collect()] };
        Self { ground, clusters }
    }

    fn canonical(ground: usize, mut clusters: Vec<Vec<usize>>) -> Self {
        for c in &mut clusters {
            c.sort_unstable();
        }
        clusters.sort_unstable_by_key(|c| c[0]);
        Self { ground, clusters }
    }

    pub fn ground(&self) -> usize {
        self.ground
    }

    pub fn clusters(&self) -> &[Vec<usize>] {
        &self.clusters
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    /// Cluster index of every element.
    pub fn block_ids(&self) -> Vec<usize> {
        let mut ids = vec![0; self.ground];
        for (b, c) in self.clusters.iter().enumerate() {
            for &i in c {
                ids[i] = b;
            }
        }
        ids
    }

    /// Clusters as 1-based index lists.
    pub fn to_one_based(&self) -> Vec<Vec<usize>> {
        self.clusters.iter().map(|c| c.iter().map(|i| i + 1).collect()).collect()
    }

    /// Relabel elements: element `e` of `self` becomes `map[e]` in the result.
    pub fn relabel(&self, map: &[usize]) -> Result<Self> {
        check_permutation(map, self.ground)?;
        let clusters = self.clusters.iter().map(|c| c.iter().map(|&e| map[e]).collect()).collect();
        Ok(Self::canonical(self.ground, clusters))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("partition serializes")
    }
}

impl Serialize for Partition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_one_based().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Partition {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let one_based: Vec<Vec<usize>> = Vec::deserialize(d)?;
        let ground = one_based.iter().map(Vec::len).sum();
        let refs: Vec<&[usize]> = one_based.iter().map(Vec::as_slice).collect();
        Partition::from_one_based(ground, &refs).map_err(serde::de::Error::custom)
    }
}

/// P*(T^ℓ): objects grouped exactly by equal labels.
pub fn correct_partition(seq: &ObjectSequence) -> Partition {
    Partition::from_keys(seq.labels())
}

fn same_ground(p: &Partition, q: &Partition) -> Result<()> {
    if p.ground != q.ground {
        return Err(Error::GroundSetMismatch(p.ground, q.ground));
    }
    Ok(())
}

/// `p ⪯ q`: every cluster of `p` sits inside some cluster of `q`.
pub fn refines(p: &Partition, q: &Partition) -> Result<bool> {
    same_ground(p, q)?;
    let q_ids = q.block_ids();
    Ok(p.clusters.iter().all(|c| c.iter().all(|&i| q_ids[i] == q_ids[c[0]])))
}

/// Coarsest common refinement: the nonempty blockwise intersections.
pub fn meet(parts: &[Partition]) -> Result<Partition> {
    let first = parts.first().ok_or(Error::Empty("meet of no partitions"))?;
    for p in &parts[1..] {
        same_ground(first, p)?;
    }
    let ids: Vec<Vec<usize>> = parts.iter().map(Partition::block_ids).collect();
    let keys: Vec<Vec<usize>> = (0..first.ground).map(|e| ids.iter().map(|b| b[e]).collect()).collect();
    Ok(Partition::from_keys(&keys))
}

/// 0/1 block error: true iff the partitions differ as sets of sets.
pub fn clustering_error(estimate: &Partition, truth: &Partition) -> Result<bool> {
    same_ground(estimate, truth)?;
    Ok(estimate != truth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(ground: usize, clusters: &[&[usize]]) -> Partition {
        Partition::from_one_based(ground, clusters).unwrap()
    }

    fn seq(tau: usize, labels: &[u8]) -> ObjectSequence {
        ObjectSequence::new(tau, labels.to_vec()).unwrap()
    }

    #[test]
    fn correct_partition_examples() {
        assert_eq!(correct_partition(&seq(1, &[1, 1, 1])), p(3, &[&[1, 2, 3]]));
        assert_eq!(
            correct_partition(&seq(3, &[1, 2, 2, 3, 1, 2, 3])),
            p(7, &[&[1, 5], &[2, 3, 6], &[4, 7]])
        );
        assert_eq!(correct_partition(&seq(3, &[1, 2, 3])), p(3, &[&[1], &[2], &[3]]));
    }

    #[test]
    fn refines_examples() {
        assert!(refines(&p(2, &[&[1], &[2]]), &p(2, &[&[1, 2]])).unwrap());
        assert!(!refines(&p(2, &[&[1, 2]]), &p(2, &[&[1], &[2]])).unwrap());
        assert!(!refines(&p(3, &[&[1, 2], &[3]]), &p(3, &[&[1, 3], &[2]])).unwrap());
        assert!(matches!(
            refines(&p(2, &[&[1, 2]]), &p(3, &[&[1, 2, 3]])),
            Err(Error::GroundSetMismatch(2, 3))
        ));
    }

    #[test]
    fn meet_examples() {
        assert_eq!(meet(&[p(3, &[&[1, 2, 3]])]).unwrap(), p(3, &[&[1, 2, 3]]));
        assert_eq!(
            meet(&[p(3, &[&[1, 2], &[3]]), p(3, &[&[1], &[2, 3]])]).unwrap(),
            p(3, &[&[1], &[2], &[3]])
        );
        assert_eq!(
            meet(&[p(3, &[&[1, 2, 3]]), p(3, &[&[1, 2], &[3]])]).unwrap(),
            p(3, &[&[1, 2], &[3]])
        );
        assert!(matches!(meet(&[]), Err(Error::Empty(_))));
        assert!(matches!(meet(&[p(2, &[&[1, 2]]), p(3, &[&[1, 2, 3]])]), Err(Error::GroundSetMismatch(..))));
    }

    #[test]
    fn clustering_error_examples() {
        assert!(!clustering_error(&p(2, &[&[1, 2]]), &p(2, &[&[1, 2]])).unwrap());
        assert!(clustering_error(&p(2, &[&[1], &[2]]), &p(2, &[&[1, 2]])).unwrap());
        let truth = correct_partition(&seq(3, &[1, 2, 2, 3, 1, 2, 3]));
        assert!(!clustering_error(&p(7, &[&[1, 5], &[2, 3, 6], &[4, 7]]), &truth).unwrap());
    }

    #[test]
    fn invalid_partitions_rejected() {
        assert!(Partition::from_clusters(3, vec![vec![0, 1]]).is_err());
        assert!(Partition::from_clusters(2, vec![vec![0, 1], vec![1]]).is_err());
        assert!(Partition::from_clusters(2, vec![vec![0, 1], vec![]]).is_err());
        assert!(Partition::from_clusters(2, vec![vec![0, 2]]).is_err());
        assert!(ObjectSequence::new(2, vec![1, 3]).is_err());
        assert!(ObjectSequence::new(2, vec![0]).is_err());
        assert!(seq(2, &[1, 2]).with_prior(vec![0.5, 0.6]).is_err());
    }

    #[test]
    fn json_is_sorted_one_based() {
        let part = Partition::from_clusters(4, vec![vec![3, 1], vec![2, 0]]).unwrap();
        assert_eq!(part.to_json(), "[[1,3],[2,4]]");
        let back: Partition = serde_json::from_str("[[2,4],[3,1]]").unwrap();
        assert_eq!(back, part);
    }

    fn arb_partition(ground: usize) -> impl Strategy<Value = Partition> {
        prop::collection::vec(0..ground, ground).prop_map(|keys| Partition::from_keys(&keys))
    }

    fn arb_triple() -> impl Strategy<Value = (Partition, Partition, Partition)> {
        (1usize..=12).prop_flat_map(|l| (arb_partition(l), arb_partition(l), arb_partition(l)))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn meet_is_a_semilattice((a, b, c) in arb_triple()) {
            let m = |x: &Partition, y: &Partition| meet(&[x.clone(), y.clone()]).unwrap();
            prop_assert_eq!(m(&a, &a), a.clone());
            prop_assert_eq!(m(&a, &b), m(&b, &a));
            prop_assert_eq!(m(&m(&a, &b), &c), m(&a, &m(&b, &c)));
        }

        #[test]
        fn meet_is_greatest_lower_bound((a, b, c) in arb_triple()) {
            let m = meet(&[a.clone(), b.clone()]).unwrap();
            prop_assert!(refines(&m, &a).unwrap());
            prop_assert!(refines(&m, &b).unwrap());
            if refines(&c, &a).unwrap() && refines(&c, &b).unwrap() {
                prop_assert!(refines(&c, &m).unwrap());
            }
            // a lower bound of a and b built by hand: split c along a and b
            let (ia, ib, ic) = (a.block_ids(), b.block_ids(), c.block_ids());
            let keys: Vec<_> = (0..a.ground()).map(|e| (ia[e], ib[e], ic[e])).collect();
            let lower = Partition::from_keys(&keys);
            prop_assert!(refines(&lower, &a).unwrap() && refines(&lower, &b).unwrap());
            prop_assert!(refines(&lower, &m).unwrap());
        }

        #[test]
        fn refines_is_a_partial_order((a, b, c) in arb_triple()) {
            prop_assert!(refines(&a, &a).unwrap());
            if refines(&a, &b).unwrap() && refines(&b, &a).unwrap() {
                prop_assert_eq!(&a, &b);
            }
            if refines(&a, &b).unwrap() && refines(&b, &c).unwrap() {
                prop_assert!(refines(&a, &c).unwrap());
            }
        }

        #[test]
        fn correct_partition_is_valid(labels in prop::collection::vec(1u8..=4, 1..20)) {
            let s = ObjectSequence::new(4, labels.clone()).unwrap();
            let truth = correct_partition(&s);
            let rebuilt = Partition::from_clusters(truth.ground(), truth.clusters().to_vec()).unwrap();
            prop_assert_eq!(&rebuilt, &truth);
            prop_assert!(!clustering_error(&truth, &truth).unwrap());
            let ids = truth.block_ids();
            for i in 0..labels.len() {
                for j in 0..labels.len() {
                    prop_assert_eq!(labels[i] == labels[j], ids[i] == ids[j]);
                }
            }
        }
    }
}
