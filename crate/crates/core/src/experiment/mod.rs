//! Seeded Monte-Carlo experiments.
//!
//! An [`ExperimentPlan`] names a decoder, a worker model and a one-parameter
//! sweep. [`run_trials`] estimates the block-error rate at each grid point
//! with Wilson intervals; [`estimate_sample_complexity`] bisects an n grid
//! for the smallest budget meeting a target error. All randomness flows from
//! the plan's master seed, so output is identical across runs and thread
//! counts.

mod appendix;
mod complexity;
mod plan;
mod run;
mod selftest;

pub use appendix::{verify_appendix_c, AppendixReport, AppendixRow, APPENDIX_TOL};
pub use complexity::{estimate_sample_complexity, least_squares, loglog_slope, semilog_slope, ComplexityPoint, ComplexityResult};
pub use plan::{Decoder, DivergenceChoice, ExperimentPlan, GridPoint, ScheduleConfig, Sweep, SweepParam};
pub use run::{
    calibrate, count_errors, decode_trial, draw_labels, point_seed, run_trial, run_trials, wilson_interval, Calibration, CalibrationEntry,
    Constants, RunOptions, SweepResult, SweepRow, CALIBRATION_GRID, CSV_HEADER, WILSON_Z,
};
pub use selftest::{run_selftest, SelfCheck};
