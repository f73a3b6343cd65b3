//! Exact joint law of one worker's responses, by enumerating every response
//! sequence with positive probability.
//!
//! Only feasible for short sequences: the support grows like `|𝒴|^ℓ`.

use super::memory::MemoryWorkerModel;
use crate::cluster::MiTable;
use crate::divergence::{f_divergence_unchecked, tv_unchecked, FDivergenceKind, FDivergenceSpec, Pmf};
use crate::partition::ObjectSequence;
use crate::{Error, Result};

/// Longest sequence accepted for enumeration.
pub const MAX_EXACT_LEN: usize = 14;
const MAX_LEAVES: usize = 1 << 22;

/// All response sequences of one column with their probabilities.
#[derive(Debug, Clone)]
pub struct ExactJoint {
    ell: usize,
    alphabet_size: usize,
    sequences: Vec<u8>,
    probs: Vec<f64>,
}

impl ExactJoint {
    pub fn enumerate(model: &MemoryWorkerModel, labels: &ObjectSequence) -> Result<Self> {
        let ell = labels.len();
        if ell > MAX_EXACT_LEN {
            return Err(Error::EnumerationTooLarge(format!("ℓ = {ell} exceeds {MAX_EXACT_LEN}")));
        }
        if labels.tau() != model.tau() {
            return Err(Error::InvalidModel(format!("model has τ = {}, labels have τ = {}", model.tau(), labels.tau())));
        }
        if ell == 0 {
            return Err(Error::Empty("label sequence"));
        }
        let mut joint = Self { ell, alphabet_size: model.tau() + 1, sequences: Vec::new(), probs: Vec::new() };
        let same = model.same_class_history(labels.labels());
        let mut history = vec![0u8; ell];
        joint.descend(model, labels.labels(), &same, 0, 1.0, &mut history)?;
        Ok(joint)
    }

    fn descend(
        &mut self,
        model: &MemoryWorkerModel,
        labels: &[u8],
        same: &[Vec<usize>],
        i: usize,
        prob: f64,
        history: &mut [u8],
    ) -> Result<()> {
        if i == self.ell {
            if self.probs.len() >= MAX_LEAVES {
                return Err(Error::EnumerationTooLarge(format!("more than {MAX_LEAVES} response sequences")));
            }
            self.sequences.extend_from_slice(history);
            self.probs.push(prob);
            return Ok(());
        }
        let mut pmf = vec![0.0; self.alphabet_size];
        model.conditional(labels[i], i, history, &same[i], &mut pmf);
        for (s, &m) in pmf.iter().enumerate() {
            if m > 0.0 {
                history[i] = s as u8;
                self.descend(model, labels, same, i + 1, prob * m, history)?;
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.ell
    }

    pub fn is_empty(&self) -> bool {
        self.ell == 0
    }

    /// Number of sequences with positive probability.
    pub fn support_size(&self) -> usize {
        self.probs.len()
    }

    pub fn total_mass(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Joint law of the listed coordinates, row-major over `alphabet^k`.
    pub fn marginal(&self, coords: &[usize]) -> Vec<f64> {
        let m = self.alphabet_size;
        let mut table = vec![0.0; m.pow(coords.len() as u32)];
        for (seq, &p) in self.sequences.chunks_exact(self.ell).zip(&self.probs) {
            let idx = coords.iter().fold(0, |acc, &c| acc * m + seq[c] as usize);
            table[idx] += p;
        }
        table
    }

    /// `I(Y_i; Y_others)` in bits. Repeated coordinates are collapsed.
    pub fn mutual_information(&self, i: usize, others: &[usize]) -> f64 {
        let mut rest: Vec<usize> = others.to_vec();
        rest.sort_unstable();
        rest.dedup();
        let mut coords = vec![i];
        coords.extend(&rest);
        let joint = self.marginal(&coords);
        let m = self.alphabet_size;
        let tail = joint.len() / m;
        let mut left = vec![0.0; m];
        let mut right = vec![0.0; tail];
        for (idx, &p) in joint.iter().enumerate() {
            left[idx / tail] += p;
            right[idx % tail] += p;
        }
        let mut mi = 0.0;
        for (idx, &p) in joint.iter().enumerate() {
            if p > 0.0 {
                mi += p * (p / (left[idx / tail] * right[idx % tail])).log2();
            }
        }
        mi.max(0.0)
    }
}

/// True `I(Y_i; Y_{i−1}, Y_j)` for every `j < i`.
pub fn exact_mi_table(model: &MemoryWorkerModel, labels: &ObjectSequence) -> Result<MiTable> {
    let joint = ExactJoint::enumerate(model, labels)?;
    Ok(MiTable::from_fn(labels.len(), |i, j| joint.mutual_information(i, &[i - 1, j])))
}

/// `θ_m = ½(min_i I(Y_i; Y_𝒩ᵢ) − max_{j<i, j∉𝒩ᵢ} I(Y_i; Y_{i−1}, Y_j))`.
///
/// The minimum runs over objects that have an earlier object of the same
/// class; an empty maximum counts as 0. Returns 0 if no object has a
/// same-class predecessor.
pub fn memory_quality(model: &MemoryWorkerModel, labels: &ObjectSequence) -> Result<f64> {
    let joint = ExactJoint::enumerate(model, labels)?;
    let depth = model.memory_depth();
    let mut min_neighbor = f64::INFINITY;
    let mut max_other: f64 = 0.0;
    for i in 1..labels.len() {
        let hood = super::neighbors(labels, i, depth);
        if super::same_class_predecessor(labels.labels(), i).is_some() {
            min_neighbor = min_neighbor.min(joint.mutual_information(i, &hood));
        }
        for j in (0..i).filter(|j| !hood.contains(j)) {
            max_other = max_other.max(joint.mutual_information(i, &[i - 1, j]));
        }
    }
    if min_neighbor.is_infinite() {
        return Ok(0.0);
    }
    Ok(0.5 * (min_neighbor - max_other))
}

/// `θ_d`: minimum divergence over ordered pairs of distinct class channels
/// (total variation for the TV spec).
pub fn distance_quality(channels: &[Pmf], spec: &FDivergenceSpec) -> Result<f64> {
    if channels.len() < 2 {
        return Err(Error::InvalidModel("θ_d needs at least two classes".into()));
    }
    let size = channels[0].len();
    if let Some(q) = channels.iter().find(|q| q.len() != size) {
        return Err(Error::LengthMismatch(q.len(), size));
    }
    let mut best = f64::INFINITY;
    for (s, p) in channels.iter().enumerate() {
        for (t, q) in channels.iter().enumerate() {
            if s != t {
                let d = match spec.kind() {
                    FDivergenceKind::TotalVariation => tv_unchecked(p.mass(), q.mass()),
                    _ => f_divergence_unchecked(spec, p.mass(), q.mass()),
                };
                best = best.min(d);
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info::binary_entropy;
    use crate::sim::neighbors;
    use crate::sim::symmetric_channels;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn seq(tau: usize, labels: &[u8]) -> ObjectSequence {
        ObjectSequence::new(tau, labels.to_vec()).unwrap()
    }

    fn random_labels(rng: &mut ChaCha8Rng, tau: usize, ell: usize) -> ObjectSequence {
        seq(tau, &(0..ell).map(|_| rng.gen_range(1..=tau as u8)).collect::<Vec<_>>())
    }

    #[test]
    fn memoryless_table_is_zero() {
        let model = MemoryWorkerModel::same_class_copy(symmetric_channels(2, 0.3).unwrap(), 0.0, 1).unwrap();
        let table = exact_mi_table(&model, &seq(2, &[1, 2, 1, 1, 2])).unwrap();
        for i in 1..5 {
            for j in 0..i {
                assert!(table.get(i, j).abs() < 1e-12);
            }
        }
        assert!(memory_quality(&model, &seq(2, &[1, 2, 1, 1, 2])).unwrap().abs() < 1e-12);
    }

    #[test]
    fn copy_marginals_are_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let tau = rng.gen_range(2..=3);
            let ell = rng.gen_range(2..=if tau == 2 { 10 } else { 7 });
            let labels = random_labels(&mut rng, tau, ell);
            let channels = symmetric_channels(tau, rng.gen_range(0.1..0.9)).unwrap();
            let model = MemoryWorkerModel::same_class_copy(channels.clone(), rng.gen_range(0.1..0.95), rng.gen_range(1..=2)).unwrap();
            let joint = ExactJoint::enumerate(&model, &labels).unwrap();
            assert!((joint.total_mass() - 1.0).abs() < 1e-12);
            for (i, &t) in labels.labels().iter().enumerate() {
                for (a, b) in joint.marginal(&[i]).iter().zip(channels[t as usize - 1].mass()) {
                    assert!((a - b).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn same_class_steps_carry_equal_information() {
        let model = MemoryWorkerModel::same_class_copy(symmetric_channels(2, 0.4).unwrap(), 0.5, 1).unwrap();
        let labels = seq(2, &[1, 2, 1, 1, 2, 2, 1, 2]);
        let joint = ExactJoint::enumerate(&model, &labels).unwrap();
        let steps: Vec<f64> = (0..labels.len())
            .filter_map(|i| crate::sim::same_class_predecessor(labels.labels(), i).map(|k| joint.mutual_information(i, &[k])))
            .collect();
        for s in &steps {
            assert!((s - steps[0]).abs() < 1e-12);
        }
    }

    #[test]
    fn inertial_step_information() {
        for eps in [0.1, 0.25, 0.4] {
            let model = MemoryWorkerModel::inertial(2, eps).unwrap();
            let joint = ExactJoint::enumerate(&model, &seq(2, &[1, 2, 1])).unwrap();
            let expected = 1.0 - binary_entropy(0.5 - eps).unwrap();
            assert!((joint.mutual_information(2, &[0]) - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn strict_data_processing() {
        // With ĩ < i − 1 the neighbor set strictly dominates every other pair.
        // When ĩ = i − 1 every pair (i−1, j) already contains the neighbor and ties.
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut checked = 0;
        while checked < 60 {
            let tau = rng.gen_range(2..=3);
            let ell = rng.gen_range(3..=if tau == 2 { 10 } else { 7 });
            let labels = random_labels(&mut rng, tau, ell);
            let rho = [0.3, 0.6, 0.9][rng.gen_range(0..3)];
            let model = MemoryWorkerModel::same_class_copy(symmetric_channels(tau, 0.4).unwrap(), rho, 1).unwrap();
            let joint = ExactJoint::enumerate(&model, &labels).unwrap();
            for i in 1..ell {
                let Some(k) = crate::sim::same_class_predecessor(labels.labels(), i) else { continue };
                let hood = neighbors(&labels, i, 1);
                let top = joint.mutual_information(i, &hood);
                for j in (0..i).filter(|j| !hood.contains(j)) {
                    let other = joint.mutual_information(i, &[i - 1, j]);
                    if k < i - 1 {
                        assert!(top > other + 1e-9, "labels {:?}, i={i}, j={j}", labels.labels());
                    } else {
                        assert!((top - other).abs() < 1e-12);
                    }
                }
            }
            checked += 1;
        }
    }

    #[test]
    fn inertial_memory_quality_example() {
        let model = MemoryWorkerModel::inertial(2, 0.25).unwrap();
        let theta = memory_quality(&model, &seq(2, &[1, 2, 1, 2])).unwrap();
        assert!((theta - 0.5 * (1.0 - binary_entropy(0.25).unwrap())).abs() < 1e-12);
        assert!((theta - 0.0943609377704336).abs() < 1e-12);
    }

    #[test]
    fn distance_quality_examples() {
        let points = vec![Pmf::point_mass(3, 1).unwrap(), Pmf::point_mass(3, 2).unwrap()];
        assert_eq!(distance_quality(&points, &FDivergenceSpec::total_variation()).unwrap(), 1.0);
        let sym = symmetric_channels(3, 0.3).unwrap();
        assert!((distance_quality(&sym, &FDivergenceSpec::total_variation()).unwrap() - 0.3).abs() < 1e-12);
        let kl = FDivergenceSpec::kl(4.0).unwrap();
        assert!(distance_quality(&sym, &kl).unwrap() > 0.0);
    }

    #[test]
    fn too_long_is_rejected() {
        let model = MemoryWorkerModel::inertial(2, 0.1).unwrap();
        assert!(matches!(
            ExactJoint::enumerate(&model, &seq(2, &[1; 15])),
            Err(Error::EnumerationTooLarge(_))
        ));
    }
}
