use super::MiTable;
use crate::partition::Partition;
use crate::Result;

/// Backward sweep over the information table.
///
/// Object `i` (from last to first) opens a new cluster unless an earlier step
/// already placed it. Its parent `η_i` is the largest `j < i` whose
/// `I(Y_i; Y_{i−1}, Y_j)` is within `gamma` of the row maximum; the parent joins
/// `i`'s cluster only if it has not been placed yet. The first object has no
/// candidates.
///
/// The table holds one same-class candidate per entry, so the output is only
/// guaranteed to coarsen the truth for memory depth 1.
pub fn cluster_info(mi: &MiTable, gamma: f64) -> Result<Partition> {
    mi.validate()?;
    let ell = mi.len();
    let mut cluster: Vec<Option<usize>> = vec![None; ell];
    let mut opened = 0;
    for i in (0..ell).rev() {
        let own = *cluster[i].get_or_insert_with(|| {
            opened += 1;
            opened - 1
        });
        if i == 0 {
            continue;
        }
        let best = (0..i).map(|j| mi.get(i, j)).fold(f64::NEG_INFINITY, f64::max);
        let parent = (0..i).rev().find(|&j| mi.get(i, j) >= best - gamma).expect("row maximum is attained");
        if cluster[parent].is_none() {
            cluster[parent] = Some(own);
        }
    }
    let ids: Vec<usize> = cluster.into_iter().map(|c| c.expect("every object is placed")).collect();
    Ok(Partition::from_keys(&ids))
}
