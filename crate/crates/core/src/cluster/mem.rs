use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{cluster_info, MiTable, ScheduleBranch, ThresholdSchedule};
use crate::partition::{meet, ObjectSequence, Partition};
use crate::rng::derive_seed;
use crate::sim::{resample_permutation, ResponseMatrix, ResponseSource};
use crate::{Error, Result};

/// Number of random orderings: `⌈−ln ε / (ln ℓ − 2 ln τ)⌉`. Needs `ℓ > τ²`.
pub fn permutation_rounds(ell: usize, tau: usize, epsilon: f64) -> Result<usize> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::OutOfRange { value: epsilon, range: "(0, 1) for ε" });
    }
    if ell <= tau * tau {
        return Err(Error::Infeasible(format!("ℓ = {ell} must exceed τ² = {}", tau * tau)));
    }
    let k = (-epsilon.ln() / ((ell as f64).ln() - 2.0 * (tau as f64).ln())).ceil();
    Ok((k as usize).max(1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MemOptions {
    /// Use this many orderings instead of the ε-derived count.
    pub rounds: Option<usize>,
    /// Draw uniform orderings; when false every round keeps the given order.
    pub shuffle: bool,
}

impl Default for MemOptions {
    fn default() -> Self {
        Self { rounds: None, shuffle: true }
    }
}

/// One ordering: position `p` held object `permutation[p]`.
#[derive(Debug, Clone)]
pub struct MemRound {
    pub permutation: Vec<usize>,
    /// Rows in permuted order.
    pub responses: ResponseMatrix,
    /// Result of the information sweep, in original object ids.
    pub partition: Partition,
}

#[derive(Debug, Clone)]
pub struct MemOutcome {
    /// Meet of all per-round partitions.
    pub partition: Partition,
    pub rounds: Vec<MemRound>,
}

/// Memory decoder; see [`cluster_mem_detailed`].
pub fn cluster_mem<S: ResponseSource + ?Sized>(
    source: &S,
    labels: &ObjectSequence,
    n: usize,
    epsilon: f64,
    schedule: &ThresholdSchedule,
    seed: u64,
) -> Result<Partition> {
    Ok(cluster_mem_detailed(source, labels, n, epsilon, schedule, seed, MemOptions::default())?.partition)
}

/// For each of `k` rounds: draw an ordering, collect `n` fresh responses per
/// object in that order, estimate the information table, run [`cluster_info`]
/// and translate the result back to object ids. The output is the meet of the
/// rounds.
pub fn cluster_mem_detailed<S: ResponseSource + ?Sized>(
    source: &S,
    labels: &ObjectSequence,
    n: usize,
    epsilon: f64,
    schedule: &ThresholdSchedule,
    seed: u64,
    options: MemOptions,
) -> Result<MemOutcome> {
    if schedule.branch() != ScheduleBranch::InfoAlpha {
        return Err(Error::InvalidSchedule(format!("{:?} schedule given to the memory decoder", schedule.branch())));
    }
    let ell = labels.len();
    let k = match options.rounds {
        Some(0) => return Err(Error::InvalidPlan("at least one round is needed".into())),
        Some(k) => k,
        None => permutation_rounds(ell, labels.tau(), epsilon)?,
    };
    let gamma = schedule.gamma(n);
    let rounds: Vec<MemRound> = (0..k as u64)
        .into_par_iter()
        .map(|r| {
            let mut permutation: Vec<usize> = (0..ell).collect();
            if options.shuffle {
                permutation.shuffle(&mut ChaCha8Rng::seed_from_u64(derive_seed(seed, &[r, 0])));
            }
            let (_, responses) = resample_permutation(source, labels, &permutation, n, derive_seed(seed, &[r, 1]))?;
            let positional = cluster_info(&MiTable::from_responses(&responses), gamma)?;
            let by_position = positional.block_ids();
            let mut by_object = vec![0; ell];
            for (p, &obj) in permutation.iter().enumerate() {
                by_object[obj] = by_position[p];
            }
            Ok(MemRound { permutation, responses, partition: Partition::from_keys(&by_object) })
        })
        .collect::<Result<_>>()?;
    let parts: Vec<Partition> = rounds.iter().map(|r| r.partition.clone()).collect();
    Ok(MemOutcome { partition: meet(&parts)?, rounds })
}
