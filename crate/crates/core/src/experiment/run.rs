use std::fmt::Write as _;
use std::time::Instant;

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::plan::{Decoder, ExperimentPlan, GridPoint, SweepParam};
use crate::cluster::{cluster_mem, cluster_temp, cluster_unified, MemOptions, UnifiedOptions};
use crate::partition::{clustering_error, correct_partition, ObjectSequence, Partition};
use crate::rng::{derive_seed, stream_rng};
use crate::sim::ResponseSource;
use crate::{Error, Result};

/// Two-sided 95% normal quantile.
pub const WILSON_Z: f64 = 1.959964;

/// Candidate threshold constants tried by calibration.
pub const CALIBRATION_GRID: [f64; 4] = [0.1, 0.3, 1.0, 3.0];
const CALIBRATION_TRIALS: usize = 50;
const HELD_OUT: u64 = u64::MAX;

/// Wilson score interval for `errors` out of `trials`.
pub fn wilson_interval(errors: usize, trials: usize) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = WILSON_Z * WILSON_Z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = WILSON_Z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let lo = if errors == 0 { 0.0 } else { (centre - half).clamp(0.0, p) };
    let hi = if errors == trials { 1.0 } else { (centre + half).clamp(p, 1.0) };
    (lo, hi)
}

/// Threshold constants in force for a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Constants {
    pub c1: f64,
    pub info_c1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationEntry {
    pub c1: f64,
    pub info_c1: f64,
    pub errors: usize,
}

/// Outcome of the held-out pre-run that fixes missing constants.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Calibration {
    pub seed: u64,
    pub trials_per_point: usize,
    pub candidates: Vec<CalibrationEntry>,
    pub chosen: Constants,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub sweep_param: &'static str,
    pub value: f64,
    pub n: usize,
    pub trials: usize,
    pub errors: usize,
    pub p_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub seed: u64,
    pub wall_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub constants: Constants,
    pub calibration: Option<Calibration>,
}

pub const CSV_HEADER: &str = "sweep_param,value,n,trials,errors,p_hat,ci_lo,ci_hi,seed,wall_ms";

impl SweepResult {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{:.6},{:.6},{:.6},{},{}",
                r.sweep_param, r.value, r.n, r.trials, r.errors, r.p_hat, r.ci_lo, r.ci_hi, r.seed, r.wall_ms
            )
            .expect("write to string");
        }
        out
    }

    /// Constants and calibration details as JSON, for a sidecar file.
    pub fn metadata_json(&self) -> String {
        serde_json::to_string_pretty(&serde_json::json!({
            "constants": self.constants,
            "calibration": self.calibration,
        }))
        .expect("metadata serializes")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RunOptions {
    /// Record wall time per row. Off by default so output is byte-reproducible.
    pub wall_clock: bool,
}

/// Seed of a grid point. Every n shares one seed, so a larger n extends the
/// same labels and response streams.
pub fn point_seed(plan: &ExperimentPlan, master: u64, index: usize) -> u64 {
    let key = if plan.sweep.param == SweepParam::N { 0 } else { index as u64 };
    derive_seed(master, &[key])
}

/// Labels drawn i.i.d. from `prior` (uniform when `None`).
pub fn draw_labels<R: Rng>(tau: usize, ell: usize, prior: Option<&[f64]>, rng: &mut R) -> Result<ObjectSequence> {
    let labels: Vec<u8> = match prior {
        None => (0..ell).map(|_| rng.gen_range(1..=tau as u8)).collect(),
        Some(p) => {
            let dist = WeightedIndex::new(p).map_err(|e| Error::InvalidPlan(format!("prior: {e}")))?;
            (0..ell).map(|_| dist.sample(rng) as u8 + 1).collect()
        }
    };
    let seq = ObjectSequence::new(tau, labels)?;
    match prior {
        Some(p) => seq.with_prior(p.to_vec()),
        None => Ok(seq),
    }
}

/// Labels and decoded partition for one seeded trial.
pub fn decode_trial(plan: &ExperimentPlan, point: &GridPoint, constants: Constants, seed: u64) -> Result<(ObjectSequence, Partition)> {
    let tau = point.model.tau();
    let labels = draw_labels(tau, point.ell, plan.prior.as_deref(), &mut stream_rng(seed, 0))?;
    let response_seed = derive_seed(seed, &[1]);
    let spec = plan.divergence.spec();
    let estimate = match plan.decoder {
        Decoder::Temp => {
            let responses = point.model.sample(&labels, point.n, response_seed)?;
            cluster_temp(&responses, &spec, &plan.distance_schedule(constants.c1)?)?
        }
        Decoder::Mem => cluster_mem(&point.model, &labels, point.n, plan.epsilon, &plan.info_schedule(constants.info_c1)?, response_seed)?,
        Decoder::Unified => cluster_unified(
            &point.model,
            &labels,
            point.n,
            plan.epsilon,
            &spec,
            &plan.info_schedule(constants.info_c1)?,
            &plan.distance_schedule(constants.c1)?,
            response_seed,
            UnifiedOptions { mem: MemOptions::default(), fresh_refinement: plan.fresh_refinement },
        )?,
    };
    Ok((labels, estimate))
}

/// One seeded trial; true when the decoder missed the correct partition.
pub fn run_trial(plan: &ExperimentPlan, point: &GridPoint, constants: Constants, seed: u64) -> Result<bool> {
    let (labels, estimate) = decode_trial(plan, point, constants, seed)?;
    clustering_error(&estimate, &correct_partition(&labels))
}

/// Number of failed trials at one grid point; trials run in parallel.
pub fn count_errors(plan: &ExperimentPlan, point: &GridPoint, constants: Constants, seed: u64, trials: usize) -> Result<usize> {
    let outcomes: Vec<bool> = (0..trials as u64)
        .into_par_iter()
        .map(|t| run_trial(plan, point, constants, derive_seed(seed, &[t])))
        .collect::<Result<_>>()?;
    Ok(outcomes.into_iter().filter(|&e| e).count())
}

/// Lower median of the tied best candidates.
fn pick_lower_median<T: Clone>(tied: &[T]) -> T {
    tied[(tied.len() - 1) / 2].clone()
}

/// Fix any constant the plan leaves open by a held-out pre-run at `points`.
pub fn calibrate(plan: &ExperimentPlan, points: &[GridPoint]) -> Result<(Constants, Option<Calibration>)> {
    let needs_c1 = plan.decoder != Decoder::Mem && plan.schedule.c1.is_none();
    let needs_info = plan.decoder != Decoder::Temp && plan.schedule.info_c1.is_none();
    let fixed = Constants { c1: plan.schedule.c1.unwrap_or(1.0), info_c1: plan.schedule.info_c1.unwrap_or(0.3) };
    if !needs_c1 && !needs_info {
        return Ok((fixed, None));
    }
    let c1s: Vec<f64> = if needs_c1 { CALIBRATION_GRID.to_vec() } else { vec![fixed.c1] };
    let infos: Vec<f64> = if needs_info { CALIBRATION_GRID.to_vec() } else { vec![fixed.info_c1] };
    let seed = derive_seed(plan.master_seed, &[HELD_OUT]);
    let trials = plan.trials.min(CALIBRATION_TRIALS);
    let mut candidates = Vec::new();
    for &c1 in &c1s {
        for &info_c1 in &infos {
            let constants = Constants { c1, info_c1 };
            let mut errors = 0;
            for (idx, point) in points.iter().enumerate() {
                errors += count_errors(plan, point, constants, point_seed(plan, seed, idx), trials)?;
            }
            candidates.push(CalibrationEntry { c1, info_c1, errors });
        }
    }
    let best = candidates.iter().map(|c| c.errors).min().expect("at least one candidate");
    let tied: Vec<Constants> =
        candidates.iter().filter(|c| c.errors == best).map(|c| Constants { c1: c.c1, info_c1: c.info_c1 }).collect();
    let chosen = pick_lower_median(&tied);
    Ok((chosen, Some(Calibration { seed, trials_per_point: trials, candidates, chosen })))
}

/// Run every grid point of the plan.
pub fn run_trials(plan: &ExperimentPlan, options: RunOptions) -> Result<SweepResult> {
    plan.validate()?;
    let points: Vec<GridPoint> = plan.sweep.values.iter().map(|&v| plan.point(v)).collect::<Result<_>>()?;
    let (constants, calibration) = calibrate(plan, &points)?;
    let mut rows = Vec::with_capacity(points.len());
    for (idx, point) in points.iter().enumerate() {
        let seed = point_seed(plan, plan.master_seed, idx);
        let start = Instant::now();
        let errors = count_errors(plan, point, constants, seed, plan.trials)?;
        let wall_ms = if options.wall_clock { start.elapsed().as_millis() as u64 } else { 0 };
        let (ci_lo, ci_hi) = wilson_interval(errors, plan.trials);
        rows.push(SweepRow {
            sweep_param: plan.sweep.param.name(),
            value: point.value,
            n: point.n,
            trials: plan.trials,
            errors,
            p_hat: errors as f64 / plan.trials as f64,
            ci_lo,
            ci_hi,
            seed,
            wall_ms,
        });
    }
    Ok(SweepResult { rows, constants, calibration })
}
