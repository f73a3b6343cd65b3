//! A fast pass over the library's core invariants, for `crowd-cluster selftest`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::appendix::verify_appendix_c;
use crate::cluster::cluster_info;
use crate::divergence::{check_bounds, ratio_range, tv_distance, FDivergenceSpec, Pmf};
use crate::info::{plugin_mi, JointCounts};
use crate::partition::{correct_partition, meet, refines, ObjectSequence, Partition};
use crate::sim::converse::InertialHypotheses;
use crate::sim::{exact_mi_table, memory_quality, MemoryWorkerModel};
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelfCheck {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

fn positive_pmf(rng: &mut ChaCha8Rng, size: usize) -> Pmf {
    let w: Vec<f64> = (0..size).map(|_| rng.gen::<f64>() + 1e-3).collect();
    Pmf::from_weights(&w).expect("positive weights")
}

fn random_partition(rng: &mut ChaCha8Rng, ground: usize) -> Partition {
    let keys: Vec<u8> = (0..ground).map(|_| rng.gen_range(0..4)).collect();
    Partition::from_keys(&keys)
}

fn lattice(rng: &mut ChaCha8Rng) -> Result<SelfCheck> {
    let mut failures = 0;
    for _ in 0..500 {
        let ground = rng.gen_range(1..12);
        let (a, b) = (random_partition(rng, ground), random_partition(rng, ground));
        let m = meet(&[a.clone(), b.clone()])?;
        let ok = refines(&m, &a)? && refines(&m, &b)? && meet(&[b.clone(), a.clone()])? == m && meet(&[a.clone(), a.clone()])? == a;
        failures += usize::from(!ok);
    }
    Ok(SelfCheck { name: "partition lattice laws", pass: failures == 0, detail: format!("{failures} failures / 500") })
}

fn divergence_bounds(rng: &mut ChaCha8Rng) -> Result<SelfCheck> {
    let mut failures = 0;
    for _ in 0..2000 {
        let size = rng.gen_range(2..=6);
        let (p, q) = (positive_pmf(rng, size), positive_pmf(rng, size));
        let (r, upper) = ratio_range(&p, &q)?;
        let kl = FDivergenceSpec::kl_on_range(r.min(1.0), upper.max(1.0))?;
        let report = check_bounds(&kl, &p, &q)?;
        let tv = FDivergenceSpec::total_variation();
        let doubled = (crate::divergence::f_divergence(&tv, &p, &q)? - 2.0 * tv_distance(&p, &q)?).abs() <= 1e-12;
        failures += usize::from(!(report.all_ok() && doubled));
    }
    Ok(SelfCheck { name: "divergence bounds", pass: failures == 0, detail: format!("{failures} failures / 2000") })
}

fn mi_symmetry(rng: &mut ChaCha8Rng) -> Result<SelfCheck> {
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let (a, b) = (rng.gen_range(2..5), rng.gen_range(2..5));
        let samples: Vec<[usize; 2]> = (0..100).map(|_| [rng.gen_range(0..a), rng.gen_range(0..b)]).collect();
        let xy = plugin_mi(&JointCounts::from_samples([a, b], samples.iter().copied())?)?;
        let yx = plugin_mi(&JointCounts::from_samples([b, a], samples.iter().map(|s| [s[1], s[0]]))?)?;
        worst = worst.max((xy - yx).abs());
    }
    Ok(SelfCheck { name: "mutual information symmetry", pass: worst <= 1e-12, detail: format!("max asymmetry {worst:e}") })
}

fn appendix() -> Result<SelfCheck> {
    let report = verify_appendix_c(&[0.1, 0.25, 0.4], &[4, 5, 6, 7, 8])?;
    Ok(SelfCheck {
        name: "inertial hypothesis closed forms",
        pass: report.pass,
        detail: format!("max deviation {:e}", report.max_deviation),
    })
}

fn worked_examples() -> Result<SelfCheck> {
    let channels = crate::sim::symmetric_channels(3, 0.4)?;
    let model = MemoryWorkerModel::same_class_copy(channels, 0.6, 1)?;
    let run = |labels: &[u8]| -> Result<Partition> {
        let seq = ObjectSequence::new(3, labels.to_vec())?;
        cluster_info(&exact_mi_table(&model, &seq)?, 1e-9)
    };
    let a = run(&[1, 2, 2, 3, 1, 2, 3])? == Partition::from_one_based(7, &[&[1, 5], &[2, 3, 6], &[4, 7]])?;
    let b = run(&[1, 2, 2, 1, 3, 2, 3])? == Partition::from_one_based(7, &[&[1, 4, 5, 7], &[2, 3, 6]])?;
    Ok(SelfCheck { name: "information sweep on exact tables", pass: a && b, detail: format!("case a: {a}, case b: {b}") })
}

fn exact_monotone(rng: &mut ChaCha8Rng) -> Result<SelfCheck> {
    let mut failures = 0;
    for _ in 0..50 {
        let ell = rng.gen_range(3..=8);
        let labels: Vec<u8> = (0..ell).map(|_| rng.gen_range(1..=2)).collect();
        let seq = ObjectSequence::new(2, labels)?;
        let model = MemoryWorkerModel::same_class_copy(crate::sim::symmetric_channels(2, 0.4)?, 0.6, 1)?;
        let out = cluster_info(&exact_mi_table(&model, &seq)?, 1e-9)?;
        failures += usize::from(!refines(&correct_partition(&seq), &out)?);
    }
    Ok(SelfCheck { name: "sweep output coarsens the truth", pass: failures == 0, detail: format!("{failures} failures / 50") })
}

fn memory_quality_example() -> Result<SelfCheck> {
    let model = MemoryWorkerModel::inertial(2, 0.25)?;
    let theta = memory_quality(&model, &ObjectSequence::new(2, vec![1, 2, 1, 2])?)?;
    let h = InertialHypotheses::new(4, 0.25)?;
    let ok = (theta - 0.5 * h.closed_from_null(1)).abs() < 1e-12;
    Ok(SelfCheck { name: "memory quality of the inertial channel", pass: ok, detail: format!("θ_m = {theta}") })
}

/// Run every check with a fixed seed.
pub fn run_selftest() -> Result<Vec<SelfCheck>> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5e1f);
    Ok(vec![
        lattice(&mut rng)?,
        divergence_bounds(&mut rng)?,
        mi_symmetry(&mut rng)?,
        appendix()?,
        worked_examples()?,
        exact_monotone(&mut rng)?,
        memory_quality_example()?,
    ])
}
