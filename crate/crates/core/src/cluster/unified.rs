use super::{cluster_mem_detailed, cluster_temp, MemOptions, ThresholdSchedule};
use crate::divergence::FDivergenceSpec;
use crate::partition::{ObjectSequence, Partition};
use crate::rng::derive_seed;
use crate::sim::ResponseSource;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct UnifiedOptions {
    pub mem: MemOptions,
    /// Draw a fresh matrix for the distance stage instead of reusing the
    /// first ordering's responses.
    pub fresh_refinement: bool,
}

/// Memory decoder first, then the distance decoder inside every memory cluster.
#[allow(clippy::too_many_arguments)]
pub fn cluster_unified<S: ResponseSource + ?Sized>(
    source: &S,
    labels: &ObjectSequence,
    n: usize,
    epsilon: f64,
    spec: &FDivergenceSpec,
    mem_schedule: &ThresholdSchedule,
    temp_schedule: &ThresholdSchedule,
    seed: u64,
    options: UnifiedOptions,
) -> Result<Partition> {
    let outcome = cluster_mem_detailed(source, labels, n, epsilon, mem_schedule, seed, options.mem)?;
    let ell = labels.len();
    // row of the refinement matrix holding each object
    let (responses, row_of) = if options.fresh_refinement {
        (source.sample(labels, n, derive_seed(seed, &[u64::MAX]))?, (0..ell).collect::<Vec<_>>())
    } else {
        let first = &outcome.rounds[0];
        let mut row_of = vec![0; ell];
        for (p, &obj) in first.permutation.iter().enumerate() {
            row_of[obj] = p;
        }
        (first.responses.clone(), row_of)
    };
    let mut clusters = Vec::new();
    for cluster in outcome.partition.clusters() {
        let rows: Vec<usize> = cluster.iter().map(|&o| row_of[o]).collect();
        let sub = cluster_temp(&responses.select_rows(&rows), spec, temp_schedule)?;
        clusters.extend(sub.clusters().iter().map(|c| c.iter().map(|&k| cluster[k]).collect::<Vec<_>>()));
    }
    Partition::from_clusters(ell, clusters)
}
