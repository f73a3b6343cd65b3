use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cluster::ThresholdSchedule;
use crate::divergence::FDivergenceSpec;
use crate::sim::{ResponseSource, WorkerModel};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decoder {
    Temp,
    Mem,
    Unified,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    N,
    Ell,
    ThetaD,
    ThetaM,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::N => "n",
            SweepParam::Ell => "ell",
            SweepParam::ThetaD => "theta_d",
            SweepParam::ThetaM => "theta_m",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

/// Threshold constants. Missing `c1` / `info_c1` are calibrated before the run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScheduleConfig {
    /// Distance-decoder constant.
    #[serde(default)]
    pub c1: Option<f64>,
    /// Distance-decoder exponent for total variation.
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    /// Distance-decoder exponent for other divergences.
    #[serde(default = "default_beta")]
    pub beta: f64,
    /// Information-decoder constant.
    #[serde(default)]
    pub info_c1: Option<f64>,
    #[serde(default = "default_alpha")]
    pub info_alpha: f64,
}

fn default_alpha() -> f64 {
    0.25
}

fn default_beta() -> f64 {
    0.5
}

fn default_epsilon() -> f64 {
    0.1
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        Self { c1: None, alpha: default_alpha(), beta: default_beta(), info_c1: None, info_alpha: default_alpha() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DivergenceChoice {
    #[default]
    TotalVariation,
    Kl,
}

impl DivergenceChoice {
    pub fn spec(self) -> FDivergenceSpec {
        match self {
            DivergenceChoice::TotalVariation => FDivergenceSpec::total_variation(),
            // L only enters the theory, never the decoder
            DivergenceChoice::Kl => FDivergenceSpec::kl(1.0).expect("valid constants"),
        }
    }
}

/// A Monte-Carlo experiment read from JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentPlan {
    pub decoder: Decoder,
    pub model: WorkerModel,
    /// Number of objects when ℓ is not swept.
    #[serde(default = "default_ell")]
    pub ell: usize,
    /// Class prior; uniform when absent.
    #[serde(default)]
    pub prior: Option<Vec<f64>>,
    /// Responses per object when n is not swept.
    #[serde(default = "default_n")]
    pub n: usize,
    pub sweep: Sweep,
    pub trials: usize,
    pub master_seed: u64,
    /// Target error level; sets the number of orderings for the memory decoder.
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default)]
    pub schedule: ScheduleConfig,
    #[serde(default)]
    pub divergence: DivergenceChoice,
    /// Unified decoder only: fresh responses for the distance stage.
    #[serde(default)]
    pub fresh_refinement: bool,
    /// Candidate n values for sample-complexity search.
    #[serde(default)]
    pub n_grid: Option<Vec<usize>>,
}

fn default_ell() -> usize {
    20
}

fn default_n() -> usize {
    100
}

/// Fully resolved settings for one grid point.
#[derive(Debug, Clone)]
pub struct GridPoint {
    pub value: f64,
    pub ell: usize,
    pub n: usize,
    pub model: WorkerModel,
}

fn as_count(value: f64, what: &str) -> Result<usize> {
    if value >= 1.0 && value.fract() == 0.0 && value <= u32::MAX as f64 {
        Ok(value as usize)
    } else {
        Err(Error::InvalidPlan(format!("{what} must be a positive integer, got {value}")))
    }
}

impl ExperimentPlan {
    pub fn from_json(text: &str) -> Result<Self> {
        let plan: Self = serde_json::from_str(text)?;
        plan.validate()?;
        Ok(plan)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidPlan("trials must be at least 1".into()));
        }
        let values = &self.sweep.values;
        if values.is_empty() {
            return Err(Error::InvalidPlan("sweep grid is empty".into()));
        }
        if values.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidPlan("sweep grid must be strictly increasing".into()));
        }
        if let Some(grid) = &self.n_grid {
            if grid.is_empty() || grid[0] == 0 || grid.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidPlan("n_grid must be nonempty, positive and strictly increasing".into()));
            }
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidPlan(format!("epsilon {} outside (0, 1)", self.epsilon)));
        }
        if let Some(prior) = &self.prior {
            if prior.len() != self.model.tau() {
                return Err(Error::InvalidPlan(format!("prior has {} entries for τ = {}", prior.len(), self.model.tau())));
            }
        }
        if self.fresh_refinement && self.decoder != Decoder::Unified {
            return Err(Error::InvalidPlan("fresh_refinement applies to the unified decoder only".into()));
        }
        for &v in values {
            self.point(v)?;
        }
        Ok(())
    }

    /// Settings at one sweep value.
    pub fn point(&self, value: f64) -> Result<GridPoint> {
        let mut point = GridPoint { value, ell: self.ell, n: self.n, model: self.model.clone() };
        match self.sweep.param {
            SweepParam::N => point.n = as_count(value, "n")?,
            SweepParam::Ell => point.ell = as_count(value, "ℓ")?,
            SweepParam::ThetaD => point.model = self.model.with_theta_d(value)?,
            SweepParam::ThetaM => point.model = self.model.with_theta_m(value)?,
        }
        if point.ell == 0 || point.n == 0 {
            return Err(Error::InvalidPlan("ℓ and n must be positive".into()));
        }
        Ok(point)
    }

    pub fn distance_schedule(&self, c1: f64) -> Result<ThresholdSchedule> {
        match self.divergence {
            DivergenceChoice::TotalVariation => ThresholdSchedule::tv_alpha(c1, self.schedule.alpha),
            DivergenceChoice::Kl => ThresholdSchedule::f_beta(c1, self.schedule.beta),
        }
    }

    pub fn info_schedule(&self, c1: f64) -> Result<ThresholdSchedule> {
        ThresholdSchedule::info_alpha(c1, self.schedule.info_alpha)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PLAN: &str = r#"{
        "decoder": "temp",
        "model": {"kind": "temporary", "tau": 2, "theta_d": 0.4},
        "ell": 20,
        "sweep": {"param": "n", "values": [50, 100, 200]},
        "trials": 10,
        "master_seed": 7,
        "schedule": {"c1": 1.0}
    }"#;

    #[test]
    fn parses_with_defaults() {
        let plan = ExperimentPlan::from_json(PLAN).unwrap();
        assert_eq!(plan.decoder, Decoder::Temp);
        assert_eq!(plan.schedule.alpha, 0.25);
        assert_eq!(plan.schedule.info_c1, None);
        assert_eq!(plan.divergence, DivergenceChoice::TotalVariation);
        assert_eq!(plan.point(100.0).unwrap().n, 100);
    }

    #[test]
    fn rejects_bad_grids() {
        let bad = PLAN.replace("[50, 100, 200]", "[100, 50]");
        assert!(ExperimentPlan::from_json(&bad).is_err());
        let bad = PLAN.replace("[50, 100, 200]", "[]");
        assert!(ExperimentPlan::from_json(&bad).is_err());
        let bad = PLAN.replace("[50, 100, 200]", "[2.5]");
        assert!(ExperimentPlan::from_json(&bad).is_err());
        let bad = PLAN.replace("\"trials\": 10", "\"trials\": 0");
        assert!(ExperimentPlan::from_json(&bad).is_err());
        let bad = PLAN.replace("\"param\": \"n\"", "\"param\": \"theta_m\"");
        assert!(ExperimentPlan::from_json(&bad).is_err());
    }

    #[test]
    fn theta_sweep_rebuilds_channels() {
        let plan = ExperimentPlan::from_json(&PLAN.replace("\"param\": \"n\", \"values\": [50, 100, 200]", "\"param\": \"theta_d\", \"values\": [0.1, 0.3]")).unwrap();
        let point = plan.point(0.3).unwrap();
        assert!((point.model.channels()[0].mass()[1] - 0.65).abs() < 1e-12);
    }
}
