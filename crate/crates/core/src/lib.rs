//! # crowd-cluster
//!
//! Universal clustering of crowdsourced responses: group objects by their
//! latent class using only the answers workers gave, without knowing the
//! response distributions or the class prior.
//!
//! ## Layout
//!
//! | Module | Contents |
//! |---|---|
//! | [`partition`] | object sequences, partitions, refinement order, lattice meet, 0/1 block error |
//! | [`divergence`] | empirical pmfs, total variation, KL, generic f-divergences and their bound checks |
//! | [`info`] | plug-in entropy / mutual-information estimators (all in bits) |
//! | [`sim`] | worker models (temporary, Markov memory, unified, converse channels), samplers, exact enumeration |
//! | [`cluster`] | the four decoders: distance (`cluster_temp`), information (`cluster_info`), permuted memory (`cluster_mem`), unified (`cluster_unified`) |
//! | [`experiment`] | seeded Monte-Carlo sweeps, sample-complexity search, hypothesis-family KL verification |
//!
//! ## Conventions
//!
//! - Logarithms are base 2 unless a name says otherwise.
//! - Response symbols are `u8`: `0` is the null response ξ, `1..=τ` are labels.
//! - Object indices are 0-based in the API and 1-based in JSON output.
//!
//! ## Quick start
//!
//! ```rust
//! use crowd_cluster::partition::{correct_partition, ObjectSequence};
//! use crowd_cluster::sim::{TemporaryWorkerModel, ResponseSource};
//! use crowd_cluster::cluster::{cluster_temp, ThresholdSchedule};
//! use crowd_cluster::divergence::FDivergenceSpec;
//!
//! let labels = ObjectSequence::new(2, vec![1, 2, 2, 1, 2]).unwrap();
//! let model = TemporaryWorkerModel::symmetric(2, 0.6).unwrap();
//! let responses = model.sample(&labels, 400, 7).unwrap();
//! let schedule = ThresholdSchedule::tv_alpha(1.0, 0.25).unwrap();
//! let estimate = cluster_temp(&responses, &FDivergenceSpec::total_variation(), &schedule).unwrap();
//! assert_eq!(estimate, correct_partition(&labels));
//! ```

// NaN-rejecting `!(x >= 0.0)` checks and index loops over matrices are deliberate.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

use thiserror::Error;

pub mod cluster;
pub mod divergence;
pub mod experiment;
pub mod info;
pub mod partition;
pub mod rng;
pub mod sim;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("ground sets differ: {0} vs {1} objects")]
    GroundSetMismatch(usize, usize),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("label {label} outside 1..={tau}")]
    LabelOutOfRange { label: u8, tau: usize },

    #[error("symbol {symbol} outside alphabet of size {size}")]
    SymbolOutOfRange { symbol: usize, size: usize },

    #[error("distributions have different lengths: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("distribution does not sum to 1 (sum = {0})")]
    NotNormalized(f64),

    #[error("negative probability mass: {0}")]
    NegativeMass(f64),

    #[error("generator is not normalized: f(1) = {0}")]
    GeneratorNotNormalized(f64),

    #[error("zero mass at index {0}; bound checks need strictly positive pmfs")]
    ZeroMass(usize),

    #[error("invalid smoothness constants: {0}")]
    InvalidConstants(String),

    #[error("value {value} outside {range}")]
    OutOfRange { value: f64, range: &'static str },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("exact enumeration infeasible: {0}")]
    EnumerationTooLarge(String),

    #[error("invalid permutation of length {0}")]
    InvalidPermutation(usize),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("missing mutual-information entry ({0}, {1})")]
    MissingEntry(usize, usize),

    #[error("infeasible configuration: {0}")]
    Infeasible(String),

    #[error("invalid plan: {0}")]
    InvalidPlan(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
