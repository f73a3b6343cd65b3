//! The universal decoders.
//!
//! - [`cluster_temp`]: threshold pairwise divergences between empirical row
//!   pmfs and read clusters off the resulting graph (temporary workers).
//! - [`cluster_info`]: backward sweep over a table of `I(Y_i; Y_{i−1}, Y_j)`
//!   that links every object to its most informative earlier object.
//! - [`cluster_mem`]: repeat [`cluster_info`] over random orderings and take
//!   the meet of the results (long-term workers).
//! - [`cluster_unified`]: [`cluster_mem`] followed by [`cluster_temp`] inside
//!   each cluster.

use serde::{Deserialize, Serialize};

use crate::info::plugin_triple_mi;
use crate::sim::ResponseMatrix;
use crate::{Error, Result};

mod info;
mod mem;
mod temp;
mod unified;

pub use info::cluster_info;
pub use mem::{cluster_mem, cluster_mem_detailed, permutation_rounds, MemOptions, MemOutcome, MemRound};
pub use temp::{clique_partition, cluster_by_divergence_matrix, cluster_temp, pairwise_divergences};
pub use unified::{cluster_unified, UnifiedOptions};

/// Which decoder family a schedule is for; fixes the admissible exponent range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleBranch {
    /// Total-variation distance decoding, exponent `α ∈ (0, ½)`.
    TvAlpha,
    /// Any other f-divergence, exponent `β ∈ (0, 1)`.
    FBeta,
    /// Mutual-information decoding, exponent `α ∈ (0, ½)`.
    InfoAlpha,
}

/// `γ_n = c₁ · n^(−exponent)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSchedule {
    c1: f64,
    exponent: f64,
    branch: ScheduleBranch,
}

impl ThresholdSchedule {
    pub fn new(c1: f64, exponent: f64, branch: ScheduleBranch) -> Result<Self> {
        if !(c1 > 0.0 && c1.is_finite()) {
            return Err(Error::InvalidSchedule(format!("c1 must be positive, got {c1}")));
        }
        let upper = match branch {
            ScheduleBranch::FBeta => 1.0,
            ScheduleBranch::TvAlpha | ScheduleBranch::InfoAlpha => 0.5,
        };
        if !(exponent > 0.0 && exponent < upper) {
            return Err(Error::InvalidSchedule(format!("exponent {exponent} outside (0, {upper}) for {branch:?}")));
        }
        Ok(Self { c1, exponent, branch })
    }

    pub fn tv_alpha(c1: f64, alpha: f64) -> Result<Self> {
        Self::new(c1, alpha, ScheduleBranch::TvAlpha)
    }

    pub fn f_beta(c1: f64, beta: f64) -> Result<Self> {
        Self::new(c1, beta, ScheduleBranch::FBeta)
    }

    pub fn info_alpha(c1: f64, alpha: f64) -> Result<Self> {
        Self::new(c1, alpha, ScheduleBranch::InfoAlpha)
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn branch(&self) -> ScheduleBranch {
        self.branch
    }

    pub fn gamma(&self, n: usize) -> f64 {
        self.c1 * (n as f64).powf(-self.exponent)
    }
}

/// `I(Y_i; Y_{i−1}, Y_j)` for every `0 ≤ j < i < ℓ` (0-based).
///
/// For `j = i − 1` the entry is `I(Y_i; Y_{i−1})`.
#[derive(Debug, Clone, PartialEq)]
pub struct MiTable {
    ell: usize,
    values: Vec<f64>,
}

fn slot(i: usize, j: usize) -> usize {
    i * (i - 1) / 2 + j
}

impl MiTable {
    pub fn from_fn(ell: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut values = Vec::with_capacity(ell * ell.saturating_sub(1) / 2);
        for i in 1..ell {
            for j in 0..i {
                values.push(f(i, j));
            }
        }
        Self { ell, values }
    }

    /// Build from explicit `(i, j, value)` entries; every pair `j < i` must appear.
    pub fn from_entries(ell: usize, entries: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let mut values = vec![f64::NAN; ell * ell.saturating_sub(1) / 2];
        for (i, j, v) in entries {
            if j >= i || i >= ell || !v.is_finite() {
                return Err(Error::MissingEntry(i, j));
            }
            values[slot(i, j)] = v;
        }
        let table = Self { ell, values };
        table.validate()?;
        Ok(table)
    }

    /// Plug-in estimates from the rows of a response matrix.
    pub fn from_responses(responses: &ResponseMatrix) -> Self {
        Self::from_fn(responses.rows(), |i, j| {
            plugin_triple_mi(&responses.triple_counts(i, i - 1, j)).expect("three coordinates")
        })
    }

    pub fn len(&self) -> usize {
        self.ell
    }

    pub fn is_empty(&self) -> bool {
        self.ell == 0
    }

    /// Entry for `j < i`; panics otherwise.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        assert!(j < i && i < self.ell, "MiTable index ({i}, {j}) out of range");
        self.values[slot(i, j)]
    }

    pub(crate) fn validate(&self) -> Result<()> {
        for i in 1..self.ell {
            for j in 0..i {
                if !self.values[slot(i, j)].is_finite() {
                    return Err(Error::MissingEntry(i, j));
                }
            }
        }
        Ok(())
    }
}
