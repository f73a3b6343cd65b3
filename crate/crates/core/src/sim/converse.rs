//! The `(ℓ+1)`-ary hypothesis family behind the memory converse.
//!
//! Under `H_0` all ℓ objects share class 1; under `H_i` object `i` alone has
//! class 2. Workers answer with the binary inertial channel `W` (repeat the
//! previous same-class answer with probability `½ + ε`), and the first answer
//! of each class is a fair bit. So `Q_0` is one Markov chain over all
//! positions, while `Q_i` makes position `i` an independent fair bit and runs
//! the chain over the remaining positions, bridging `i − 1 → i + 1`.
//!
//! Positions are 1-based here to match the hypothesis indices.

use crate::info::binary_entropy_unchecked;
use crate::{Error, Result};

/// Largest ℓ accepted; enumeration is over `2^ℓ` sequences.
pub const MAX_HYPOTHESIS_LEN: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InertialHypotheses {
    ell: usize,
    epsilon: f64,
}

impl InertialHypotheses {
    pub fn new(ell: usize, epsilon: f64) -> Result<Self> {
        if !(2..=MAX_HYPOTHESIS_LEN).contains(&ell) {
            return Err(Error::EnumerationTooLarge(format!("ℓ = {ell} outside 2..={MAX_HYPOTHESIS_LEN}")));
        }
        if !(0.0..0.5).contains(&epsilon) {
            return Err(Error::OutOfRange { value: epsilon, range: "[0, ½) for ε" });
        }
        Ok(Self { ell, epsilon })
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    fn w(&self, a: bool, b: bool) -> f64 {
        if a == b { 0.5 + self.epsilon } else { 0.5 - self.epsilon }
    }

    /// `Q_i(y)`, where bit `k − 1` of `y` is the answer at position `k`.
    pub fn probability(&self, hypothesis: usize, y: u32) -> f64 {
        let bit = |k: usize| (y >> (k - 1)) & 1 == 1;
        let mut prob = 0.5;
        let mut prev: Option<usize> = None;
        for k in 1..=self.ell {
            if k == hypothesis {
                prob *= 0.5;
                continue;
            }
            if let Some(p) = prev {
                prob *= self.w(bit(k), bit(p));
            }
            prev = Some(k);
        }
        prob
    }

    /// `D(Q_i ‖ Q_j)` in bits by summing over all `2^ℓ` answer sequences.
    pub fn kl(&self, i: usize, j: usize) -> f64 {
        let mut total = 0.0;
        for y in 0..(1u32 << self.ell) {
            let p = self.probability(i, y);
            if p > 0.0 {
                total += p * (p / self.probability(j, y)).log2();
            }
        }
        total.max(0.0)
    }

    /// All pairwise divergences, indexed `[i][j]` for `i, j ∈ 0..=ℓ`.
    pub fn kl_matrix(&self) -> Vec<Vec<f64>> {
        let tables: Vec<Vec<f64>> =
            (0..=self.ell).map(|i| (0..(1u32 << self.ell)).map(|y| self.probability(i, y)).collect()).collect();
        let kl = |p: &[f64], q: &[f64]| {
            p.iter().zip(q).filter(|(a, _)| **a > 0.0).map(|(a, b)| a * (a / b).log2()).sum::<f64>().max(0.0)
        };
        tables.iter().map(|p| tables.iter().map(|q| kl(p, q)).collect()).collect()
    }

    /// The mirror image `i ↦ ℓ + 1 − i`, fixing the null hypothesis.
    pub fn reflect(&self, i: usize) -> usize {
        if i == 0 { 0 } else { self.ell + 1 - i }
    }

    fn is_edge(&self, i: usize) -> bool {
        i == 1 || i == self.ell
    }

    /// Closed form of `D(Q_0 ‖ Q_i)` for `i ≥ 1`.
    pub fn closed_from_null(&self, i: usize) -> f64 {
        let e = self.epsilon;
        if self.is_edge(i) {
            1.0 - binary_entropy_unchecked(0.5 - e)
        } else {
            let same = 0.5 + 2.0 * e - 2.0 * e * e;
            let flip = 0.5 - 2.0 * e + 2.0 * e * e;
            1.0 + same * (0.5 + e).log2() + flip * (0.5 - e).log2()
        }
    }

    /// Closed form of `D(Q_i ‖ Q_0)` for `i ≥ 1`.
    pub fn closed_to_null(&self, i: usize) -> f64 {
        let e = self.epsilon;
        let half_log = -0.5 * (1.0 - 4.0 * e * e).log2();
        if self.is_edge(i) {
            half_log
        } else {
            1.0 - binary_entropy_unchecked(0.5 - e) + 2.0 * half_log
        }
    }
}
