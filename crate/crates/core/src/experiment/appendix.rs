use serde::Serialize;

use crate::sim::converse::InertialHypotheses;
use crate::Result;

/// Agreement tolerance between enumeration and closed forms.
pub const APPENDIX_TOL: f64 = 1e-9;

/// Deviations for one `(ℓ, ε)` configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AppendixRow {
    pub ell: usize,
    pub epsilon: f64,
    /// Enumerated `D(Q_0‖Q_1)`.
    pub d_null_first: f64,
    /// Enumerated `D(Q_1‖Q_0)`.
    pub d_first_null: f64,
    /// Worst gap between enumeration and the closed forms for `D(Q_0‖Q_i)`, `D(Q_i‖Q_0)`.
    pub closed_form_dev: f64,
    /// Worst gap under the reflection `i ↦ ℓ + 1 − i`.
    pub reflection_dev: f64,
    /// Worst gap in `D(Q_i‖Q_j) = D(Q_0‖Q_j) + D(Q_i‖Q_0)` over `|i − j| ≥ 2`.
    pub split_dev: f64,
    /// Smallest such gap over neighbors `|i − j| = 1`, where the split does not hold.
    pub neighbor_split_gap: Option<f64>,
}

impl AppendixRow {
    pub fn passes(&self) -> bool {
        self.closed_form_dev <= APPENDIX_TOL && self.reflection_dev <= APPENDIX_TOL && self.split_dev <= APPENDIX_TOL
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AppendixReport {
    pub rows: Vec<AppendixRow>,
    pub max_deviation: f64,
    pub pass: bool,
}

/// Compare brute-force KL over all `2^ℓ` sequences with the closed forms.
pub fn verify_appendix_c(epsilons: &[f64], ells: &[usize]) -> Result<AppendixReport> {
    let mut rows = Vec::new();
    for &ell in ells {
        for &epsilon in epsilons {
            let h = InertialHypotheses::new(ell, epsilon)?;
            let d = h.kl_matrix();
            let mut closed_form_dev: f64 = 0.0;
            for i in 1..=ell {
                closed_form_dev = closed_form_dev.max((d[0][i] - h.closed_from_null(i)).abs());
                closed_form_dev = closed_form_dev.max((d[i][0] - h.closed_to_null(i)).abs());
            }
            let mut reflection_dev: f64 = 0.0;
            let mut split_dev: f64 = 0.0;
            let mut neighbor_split_gap: Option<f64> = None;
            for i in 0..=ell {
                for j in 0..=ell {
                    reflection_dev = reflection_dev.max((d[i][j] - d[h.reflect(i)][h.reflect(j)]).abs());
                    if i == 0 || j == 0 || i == j {
                        continue;
                    }
                    let gap = (d[i][j] - (d[0][j] + d[i][0])).abs();
                    if i.abs_diff(j) >= 2 {
                        split_dev = split_dev.max(gap);
                    } else {
                        neighbor_split_gap = Some(neighbor_split_gap.map_or(gap, |g| g.min(gap)));
                    }
                }
            }
            rows.push(AppendixRow {
                ell,
                epsilon,
                d_null_first: d[0][1],
                d_first_null: d[1][0],
                closed_form_dev,
                reflection_dev,
                split_dev,
                neighbor_split_gap,
            });
        }
    }
    let max_deviation = rows.iter().map(|r| r.closed_form_dev.max(r.reflection_dev).max(r.split_dev)).fold(0.0, f64::max);
    let pass = rows.iter().all(AppendixRow::passes);
    Ok(AppendixReport { rows, max_deviation, pass })
}
