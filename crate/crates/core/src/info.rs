//! Plug-in (maximum-likelihood) entropy and mutual-information estimates.
//!
//! No bias correction is applied: the decoders threshold raw plug-in values.

use crate::{Error, Result};

/// Contingency table over one, two or three coordinates, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointCounts {
    dims: Vec<usize>,
    table: Vec<u64>,
    n: u64,
}

impl JointCounts {
    pub fn new(dims: Vec<usize>, table: Vec<u64>) -> Result<Self> {
        if dims.is_empty() || dims.len() > 3 || dims.contains(&0) {
            return Err(Error::InvalidPlan(format!("joint counts need 1..=3 nonzero dims, got {dims:?}")));
        }
        let cells: usize = dims.iter().product();
        if table.len() != cells {
            return Err(Error::LengthMismatch(table.len(), cells));
        }
        let n = table.iter().sum();
        if n == 0 {
            return Err(Error::Empty("joint counts"));
        }
        Ok(Self { dims, table, n })
    }

    /// Tabulate tuples of symbols; each tuple has one entry per dimension.
    pub fn from_samples<const K: usize>(dims: [usize; K], samples: impl IntoIterator<Item = [usize; K]>) -> Result<Self> {
        let mut table = vec![0u64; dims.iter().product()];
        for s in samples {
            let mut idx = 0;
            for (k, &d) in dims.iter().enumerate() {
                if s[k] >= d {
                    return Err(Error::SymbolOutOfRange { symbol: s[k], size: d });
                }
                idx = idx * d + s[k];
            }
            table[idx] += 1;
        }
        Self::new(dims.to_vec(), table)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn table(&self) -> &[u64] {
        &self.table
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Sum out all coordinates except those in `keep` (in the given order).
    pub fn marginal(&self, keep: &[usize]) -> Self {
        let dims: Vec<usize> = keep.iter().map(|&k| self.dims[k]).collect();
        let mut table = vec![0u64; dims.iter().product()];
        let mut coord = vec![0usize; self.dims.len()];
        for &count in &self.table {
            let idx = keep.iter().fold(0, |acc, &k| acc * self.dims[k] + coord[k]);
            table[idx] += count;
            for k in (0..coord.len()).rev() {
                coord[k] += 1;
                if coord[k] < self.dims[k] {
                    break;
                }
                coord[k] = 0;
            }
        }
        Self { dims, table, n: self.n }
    }

    /// Collapse coordinates 2 and 3 of a 3-D table into one product coordinate.
    pub fn merge_tail(&self) -> Result<Self> {
        if self.dims.len() != 3 {
            return Err(Error::InvalidPlan("merge_tail needs three coordinates".into()));
        }
        Ok(Self { dims: vec![self.dims[0], self.dims[1] * self.dims[2]], table: self.table.clone(), n: self.n })
    }
}

/// `−Σ p̂ log₂ p̂` over the flattened table.
pub fn plugin_entropy(counts: &JointCounts) -> f64 {
    entropy_of_counts(counts.table.iter().copied(), counts.n)
}

pub(crate) fn entropy_of_counts(counts: impl Iterator<Item = u64>, n: u64) -> f64 {
    let n = n as f64;
    // sorted so the sum does not depend on cell order (keeps Î(X;Y) = Î(Y;X) exact)
    let mut cells: Vec<u64> = counts.filter(|&c| c > 0).collect();
    cells.sort_unstable();
    let h: f64 = cells.into_iter().map(|c| { let p = c as f64 / n; -p * p.log2() }).sum();
    h.max(0.0)
}

const NEG_CLAMP: f64 = 1e-12;

/// `Î(X;Y) = Ĥ(X) + Ĥ(Y) − Ĥ(X,Y)` for a two-coordinate table.
pub fn plugin_mi(counts: &JointCounts) -> Result<f64> {
    if counts.dims.len() != 2 {
        return Err(Error::InvalidPlan("plugin_mi needs two coordinates".into()));
    }
    Ok(mi_2d(&counts.table, counts.dims[0], counts.dims[1], counts.n))
}

pub(crate) fn mi_2d(table: &[u64], rows: usize, cols: usize, n: u64) -> f64 {
    let mut row_sums = vec![0u64; rows];
    let mut col_sums = vec![0u64; cols];
    for r in 0..rows {
        for c in 0..cols {
            let v = table[r * cols + c];
            row_sums[r] += v;
            col_sums[c] += v;
        }
    }
    let mi = entropy_of_counts(row_sums.into_iter(), n) + entropy_of_counts(col_sums.into_iter(), n)
        - entropy_of_counts(table.iter().copied(), n);
    if (-NEG_CLAMP..0.0).contains(&mi) { 0.0 } else { mi }
}

/// `Î(Y₁; Y₂, Y₃)`: coordinate 1 against the pair (2, 3), by flattening the pair.
pub fn plugin_triple_mi(counts: &JointCounts) -> Result<f64> {
    plugin_mi(&counts.merge_tail()?)
}

/// `h(p) = −p log₂ p − (1−p) log₂ (1−p)`.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange { value: p, range: "[0, 1]" });
    }
    Ok(binary_entropy_unchecked(p))
}

pub(crate) fn binary_entropy_unchecked(p: f64) -> f64 {
    let term = |x: f64| if x <= 0.0 { 0.0 } else { -x * x.log2() };
    term(p) + term(1.0 - p)
}

/// Inverse of `h` on `[0, ½]`, by bisection.
pub fn inverse_binary_entropy(h: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&h) {
        return Err(Error::OutOfRange { value: h, range: "[0, 1]" });
    }
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if binary_entropy_unchecked(mid) < h { lo = mid } else { hi = mid }
    }
    Ok(0.5 * (lo + hi))
}

/// `log₂(1 + (|𝒳|−1)/n)`, the magnitude bound on the plug-in entropy bias.
pub fn entropy_bias_bound(alphabet_size: usize, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Empty("sample count"));
    }
    Ok((1.0 + alphabet_size.saturating_sub(1) as f64 / n as f64).log2())
}
