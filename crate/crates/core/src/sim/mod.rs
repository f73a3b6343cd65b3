//! Worker models and response generators.
//!
//! Three families produce a [`ResponseMatrix`] (rows = objects, columns =
//! workers) from a label sequence:
//!
//! - [`TemporaryWorkerModel`]: every cell is an independent draw from the
//!   class channel `Q_t`;
//! - [`MemoryWorkerModel`]: each column is one long-term worker whose answer
//!   to object `i` depends on its own earlier answers (same-class copy,
//!   copy-with-previous, the inertial converse channel, or the two-state
//!   unified channel);
//! - [`WorkerModel`]: a tagged union of the two, read from JSON configs.
//!
//! Sampling is deterministic given a seed. Column `j` draws from ChaCha
//! stream `j`, so the first `n` columns of a run with `n' > n` columns are
//! identical to a run with `n` columns.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::info::JointCounts;
use crate::partition::ObjectSequence;
use crate::{Error, Result};

pub mod converse;
pub mod exact;
mod memory;
mod temporary;

pub use exact::{distance_quality, exact_mi_table, memory_quality, ExactJoint};
pub use memory::{resample_permutation, solve_unified_channel, MemoryKernel, MemoryWorkerModel};
pub use temporary::{symmetric_channels, TemporaryWorkerModel};

/// Who answered each cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WorkerAssignment {
    /// Cell `(i, j)` answered by worker `j`.
    PerColumn,
    /// Every cell answered by a distinct worker, id `i·n + j`.
    PerCell,
}

/// ℓ×n responses over `0..=τ` (0 is the null response).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResponseMatrix {
    rows: usize,
    cols: usize,
    alphabet_size: usize,
    entries: Vec<u8>,
    assignment: WorkerAssignment,
}

impl ResponseMatrix {
    pub fn new(rows: usize, cols: usize, alphabet_size: usize, entries: Vec<u8>, assignment: WorkerAssignment) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::LengthMismatch(entries.len(), rows * cols));
        }
        if let Some(&s) = entries.iter().find(|&&s| s as usize >= alphabet_size) {
            return Err(Error::SymbolOutOfRange { symbol: s as usize, size: alphabet_size });
        }
        Ok(Self { rows, cols, alphabet_size, entries, assignment })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn assignment(&self) -> WorkerAssignment {
        self.assignment
    }

    pub fn worker(&self, i: usize, j: usize) -> usize {
        match self.assignment {
            WorkerAssignment::PerColumn => j,
            WorkerAssignment::PerCell => i * self.cols + j,
        }
    }

    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[u8] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<u8> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// Keep only the given rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let entries = rows.iter().flat_map(|&r| self.row(r).iter().copied()).collect();
        Self { rows: rows.len(), cols: self.cols, alphabet_size: self.alphabet_size, entries, assignment: self.assignment }
    }

    /// Counts over `(Y_a, Y_b, Y_c)` across the workers.
    pub fn triple_counts(&self, a: usize, b: usize, c: usize) -> JointCounts {
        let m = self.alphabet_size;
        let mut table = vec![0u64; m * m * m];
        for ((&x, &y), &z) in self.row(a).iter().zip(self.row(b)).zip(self.row(c)) {
            table[(x as usize * m + y as usize) * m + z as usize] += 1;
        }
        JointCounts::new(vec![m, m, m], table).expect("matrix has at least one column")
    }

    /// Counts over `(Y_a, Y_b)` across the workers.
    pub fn pair_counts(&self, a: usize, b: usize) -> JointCounts {
        let m = self.alphabet_size;
        let mut table = vec![0u64; m * m];
        for (&x, &y) in self.row(a).iter().zip(self.row(b)) {
            table[x as usize * m + y as usize] += 1;
        }
        JointCounts::new(vec![m, m], table).expect("matrix has at least one column")
    }

    /// CSV: one line per object, one integer column per worker, ξ written as 0.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.entries.len() * 2);
        for i in 0..self.rows {
            for (j, s) in self.row(i).iter().enumerate() {
                if j > 0 {
                    out.push(',');
                }
                write!(out, "{s}").expect("write to string");
            }
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}

/// Anything that can produce responses for a label sequence.
pub trait ResponseSource: Sync {
    fn tau(&self) -> usize;

    fn sample(&self, labels: &ObjectSequence, n: usize, seed: u64) -> Result<ResponseMatrix>;
}

/// `𝒩ᵢ`: the previous index plus up to `zeta` most recent same-class indices (0-based).
///
/// Returned sorted in decreasing order; empty for the first object.
pub fn neighbors(labels: &ObjectSequence, i: usize, zeta: usize) -> Vec<usize> {
    if i == 0 || i >= labels.len() {
        return Vec::new();
    }
    let t = labels.labels()[i];
    let mut out = vec![i - 1];
    out.extend((0..i).rev().filter(|&k| labels.labels()[k] == t).take(zeta));
    out.sort_unstable_by(|a, b| b.cmp(a));
    out.dedup();
    out
}

/// Most recent earlier index with the same label, if any.
pub fn same_class_predecessor(labels: &[u8], i: usize) -> Option<usize> {
    (0..i).rev().find(|&k| labels[k] == labels[i])
}

/// A worker model read from a JSON document.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WorkerModel {
    Temporary(TemporaryWorkerModel),
    Memory(MemoryWorkerModel),
}

impl WorkerModel {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// The class channels `Q_t` (pool-averaged marginals).
    pub fn channels(&self) -> &[crate::divergence::Pmf] {
        match self {
            WorkerModel::Temporary(m) => m.channels(),
            WorkerModel::Memory(m) => m.base_channels(),
        }
    }

    /// Same model with class channels rebuilt so that `min δ(Q_s, Q_t) = theta_d`.
    pub fn with_theta_d(&self, theta_d: f64) -> Result<Self> {
        Ok(match self {
            WorkerModel::Temporary(m) => WorkerModel::Temporary(m.with_theta_d(theta_d)?),
            WorkerModel::Memory(m) => WorkerModel::Memory(m.with_theta_d(theta_d)?),
        })
    }

    /// Same model with the memory strength set so that the neighbor MI is `2·theta_m`.
    pub fn with_theta_m(&self, theta_m: f64) -> Result<Self> {
        match self {
            WorkerModel::Temporary(_) => Err(Error::InvalidModel("temporary workers have no memory".into())),
            WorkerModel::Memory(m) => Ok(WorkerModel::Memory(m.with_theta_m(theta_m)?)),
        }
    }
}

impl ResponseSource for WorkerModel {
    fn tau(&self) -> usize {
        match self {
            WorkerModel::Temporary(m) => m.tau(),
            WorkerModel::Memory(m) => m.tau(),
        }
    }

    fn sample(&self, labels: &ObjectSequence, n: usize, seed: u64) -> Result<ResponseMatrix> {
        match self {
            WorkerModel::Temporary(m) => m.sample(labels, n, seed),
            WorkerModel::Memory(m) => m.sample(labels, n, seed),
        }
    }
}

/// Inverse-CDF draw from `cdf` (cumulative masses) with uniform `u`.
pub(crate) fn draw_from_cdf(cdf: &[f64], u: f64) -> usize {
    cdf.iter().position(|&c| u < c).unwrap_or_else(|| {
        // u landed in rounding slack past the last cumulative value
        cdf.iter().rposition(|&c| c > 0.0).unwrap_or(0)
    })
}

pub(crate) fn cumulative(mass: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    mass.iter().map(|m| { acc += m; acc }).collect()
}

pub(crate) fn check_labels(labels: &ObjectSequence, tau: usize, n: usize) -> Result<()> {
    if labels.tau() != tau {
        return Err(Error::InvalidModel(format!("model has τ = {tau}, labels have τ = {}", labels.tau())));
    }
    if n == 0 {
        return Err(Error::Empty("worker count"));
    }
    if labels.is_empty() {
        return Err(Error::Empty("label sequence"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(tau: usize, labels: &[u8]) -> ObjectSequence {
        ObjectSequence::new(tau, labels.to_vec()).unwrap()
    }

    #[test]
    fn neighbor_examples() {
        let s = seq(3, &[1, 2, 2, 3, 1, 2, 3]);
        // object 5 (1-based) → {4, 1}
        assert_eq!(neighbors(&s, 4, 1), vec![3, 0]);
        assert!(neighbors(&s, 0, 1).is_empty());
        assert_eq!(neighbors(&seq(1, &[1, 1, 1]), 2, 2), vec![1, 0]);
        // previous object is also the same-class predecessor
        assert_eq!(neighbors(&s, 2, 1), vec![1]);
        // first occurrence of a class: only the previous object
        assert_eq!(neighbors(&s, 3, 1), vec![2]);
    }

    #[test]
    fn csv_layout() {
        let m = ResponseMatrix::new(2, 3, 3, vec![1, 2, 0, 2, 2, 1], WorkerAssignment::PerColumn).unwrap();
        assert_eq!(m.to_csv(), "1,2,0\n2,2,1\n");
        assert_eq!(m.worker(1, 2), 2);
        assert!(ResponseMatrix::new(1, 1, 2, vec![2], WorkerAssignment::PerCell).is_err());
    }

    #[test]
    fn model_json_round_trip() {
        let text = r#"{"kind":"memory","tau":2,"base_channels":[[0,0.5,0.5],[0,0.5,0.5]],
                       "copy_prob":0.6,"memory_depth":1,"variant":{"type":"same_class_copy"}}"#;
        let model = WorkerModel::from_json(text).unwrap();
        let again = WorkerModel::from_json(&serde_json::to_string(&model).unwrap()).unwrap();
        assert_eq!(model.tau(), again.tau());
        let temp = WorkerModel::from_json(r#"{"kind":"temporary","tau":2,"theta_d":0.4}"#).unwrap();
        assert_eq!(temp.channels()[0].mass(), &[0.0, 0.7, 0.30000000000000004]);
        assert!(WorkerModel::from_json(r#"{"kind":"memory","tau":2,"copy_prob":1.0,"variant":{"type":"same_class_copy"}}"#).is_err());
    }
}
