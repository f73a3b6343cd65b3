use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use super::plan::{ExperimentPlan, SweepParam};
use super::run::{calibrate, count_errors, point_seed, Constants};
use crate::{Error, Result};

/// Empirical `n*` at one sweep value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplexityPoint {
    pub value: f64,
    /// Smallest grid n with `p̂ < target`; `None` if even the largest n misses.
    pub n_star: Option<usize>,
    /// Every evaluated `(n, p̂)`, ascending in n.
    pub evaluated: Vec<(usize, f64)>,
    /// Some smaller n met the target while a larger evaluated n did not.
    pub non_monotone: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplexityResult {
    pub target: f64,
    pub constants: Constants,
    pub points: Vec<ComplexityPoint>,
}

impl ComplexityResult {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("value,n_star,non_monotone,evaluated\n");
        for p in &self.points {
            let n_star = p.n_star.map_or_else(|| "NA".to_string(), |n| n.to_string());
            let evaluated: Vec<String> = p.evaluated.iter().map(|(n, e)| format!("{n}:{e:.6}")).collect();
            writeln!(out, "{},{},{},{}", p.value, n_star, p.non_monotone, evaluated.join(";")).expect("write to string");
        }
        out
    }

    /// `(value, n*)` pairs where a grid n met the target.
    pub fn curve(&self) -> Vec<(f64, f64)> {
        self.points.iter().filter_map(|p| p.n_star.map(|n| (p.value, n as f64))).collect()
    }
}

/// Bisect `plan.n_grid` for the smallest n whose error estimate is below `target`,
/// at each value of the (ℓ or θ) sweep.
///
/// Assumes the error decreases in n; evaluated points that contradict this are
/// flagged rather than hidden.
pub fn estimate_sample_complexity(plan: &ExperimentPlan, target: f64) -> Result<ComplexityResult> {
    plan.validate()?;
    if plan.sweep.param == SweepParam::N {
        return Err(Error::InvalidPlan("sample-complexity search sweeps ℓ or a quality, not n".into()));
    }
    let grid = plan.n_grid.clone().ok_or_else(|| Error::InvalidPlan("n_grid is required".into()))?;
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::OutOfRange { value: target, range: "(0, 1) for the target error" });
    }
    let base: Vec<_> = plan.sweep.values.iter().map(|&v| plan.point(v)).collect::<Result<_>>()?;
    let (constants, _) = calibrate(plan, &base)?;

    let mut points = Vec::with_capacity(base.len());
    for (idx, point) in base.iter().enumerate() {
        let seed = point_seed(plan, plan.master_seed, idx);
        let mut cache: BTreeMap<usize, f64> = BTreeMap::new();
        let mut p_hat = |k: usize| -> Result<f64> {
            let n = grid[k];
            if let Some(&p) = cache.get(&n) {
                return Ok(p);
            }
            let mut at_n = point.clone();
            at_n.n = n;
            let p = count_errors(plan, &at_n, constants, seed, plan.trials)? as f64 / plan.trials as f64;
            cache.insert(n, p);
            Ok(p)
        };
        // smallest index in [lo, hi) meeting the target, assuming monotone errors
        let (mut lo, mut hi) = (0usize, grid.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            if p_hat(mid)? < target { hi = mid } else { lo = mid + 1 }
        }
        let n_star = grid.get(lo).copied();
        let evaluated: Vec<(usize, f64)> = cache.into_iter().collect();
        let non_monotone = evaluated
            .iter()
            .enumerate()
            .any(|(a, &(_, pa))| pa < target && evaluated[a + 1..].iter().any(|&(_, pb)| pb >= target));
        points.push(ComplexityPoint { value: point.value, n_star, evaluated, non_monotone });
    }
    Ok(ComplexityResult { target, constants, points })
}

/// Least-squares `(slope, intercept)` of `y` on `x`.
pub fn least_squares(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(Error::Empty("fit needs two points"));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Infeasible("fit needs distinct x values".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// Slope of `n*` against `ln ℓ`.
pub fn semilog_slope(curve: &[(f64, f64)]) -> Result<f64> {
    let x: Vec<f64> = curve.iter().map(|p| p.0.ln()).collect();
    let y: Vec<f64> = curve.iter().map(|p| p.1).collect();
    Ok(least_squares(&x, &y)?.0)
}

/// Exponent `b` in `n* ≈ a·x^b`.
pub fn loglog_slope(curve: &[(f64, f64)]) -> Result<f64> {
    let x: Vec<f64> = curve.iter().map(|p| p.0.ln()).collect();
    let y: Vec<f64> = curve.iter().map(|p| p.1.ln()).collect();
    Ok(least_squares(&x, &y)?.0)
}
