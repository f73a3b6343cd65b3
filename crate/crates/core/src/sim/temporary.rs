use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use super::{check_labels, cumulative, draw_from_cdf, ResponseMatrix, ResponseSource, WorkerAssignment};
use crate::divergence::Pmf;
use crate::partition::ObjectSequence;
use crate::rng::stream_rng;
use crate::{Error, Result};

/// Memoryless workers: every cell is an independent draw given the object's class.
///
/// `channels[t-1]` is the pool-averaged `Q_t`. With `heterogeneity > 0` each
/// cell is answered by a fresh worker whose channel is drawn from a Dirichlet
/// with mean `Q_t` and concentration `1 / heterogeneity`; the cell marginal is
/// still exactly `Q_t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TemporaryConfig", into = "TemporaryConfig")]
pub struct TemporaryWorkerModel {
    tau: usize,
    channels: Vec<Pmf>,
    heterogeneity: f64,
}

#[derive(Serialize, Deserialize)]
struct TemporaryConfig {
    tau: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    channels: Option<Vec<Pmf>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    theta_d: Option<f64>,
    #[serde(default)]
    heterogeneity: f64,
}

impl TryFrom<TemporaryConfig> for TemporaryWorkerModel {
    type Error = Error;

    fn try_from(c: TemporaryConfig) -> Result<Self> {
        let model = match (c.channels, c.theta_d) {
            (Some(channels), None) => Self::new(channels)?,
            (None, Some(theta)) => Self::symmetric(c.tau, theta)?,
            _ => return Err(Error::InvalidModel("give exactly one of `channels` or `theta_d`".into())),
        };
        if model.tau != c.tau {
            return Err(Error::InvalidModel(format!("τ = {} but {} channels", c.tau, model.tau)));
        }
        model.with_heterogeneity(c.heterogeneity)
    }
}

impl From<TemporaryWorkerModel> for TemporaryConfig {
    fn from(m: TemporaryWorkerModel) -> Self {
        Self { tau: m.tau, channels: Some(m.channels), theta_d: None, heterogeneity: m.heterogeneity }
    }
}

/// Channels where class `t` answers `t` with probability `p` and every other label
/// uniformly, with `p` chosen so that any two channels are `theta_d` apart in δ.
pub fn symmetric_channels(tau: usize, theta_d: f64) -> Result<Vec<Pmf>> {
    if !(0.0..=1.0).contains(&theta_d) {
        return Err(Error::OutOfRange { value: theta_d, range: "[0, 1] for θ_d" });
    }
    if tau == 1 {
        return Ok(vec![Pmf::point_mass(2, 1)?]);
    }
    let correct = (theta_d * (tau - 1) as f64 + 1.0) / tau as f64;
    let other = (1.0 - correct) / (tau - 1) as f64;
    (1..=tau)
        .map(|t| {
            let mut mass = vec![other; tau + 1];
            mass[0] = 0.0;
            mass[t] = correct;
            Pmf::from_weights(&mass)
        })
        .collect()
}

pub(crate) fn check_channels(channels: &[Pmf]) -> Result<usize> {
    let tau = channels.len();
    if tau == 0 {
        return Err(Error::InvalidModel("no class channels".into()));
    }
    if let Some(bad) = channels.iter().find(|q| q.len() != tau + 1) {
        return Err(Error::InvalidModel(format!("channel over {} symbols, expected τ+1 = {}", bad.len(), tau + 1)));
    }
    Ok(tau)
}

impl TemporaryWorkerModel {
    pub fn new(channels: Vec<Pmf>) -> Result<Self> {
        let tau = check_channels(&channels)?;
        Ok(Self { tau, channels, heterogeneity: 0.0 })
    }

    /// Symmetric channels with pairwise total variation `theta_d`.
    pub fn symmetric(tau: usize, theta_d: f64) -> Result<Self> {
        Self::new(symmetric_channels(tau, theta_d)?)
    }

    /// Noiseless workers: `Q_t` is a point mass on `t`.
    pub fn point_mass(tau: usize) -> Result<Self> {
        Self::new((1..=tau).map(|t| Pmf::point_mass(tau + 1, t)).collect::<Result<_>>()?)
    }

    pub fn with_heterogeneity(mut self, heterogeneity: f64) -> Result<Self> {
        if !(heterogeneity >= 0.0 && heterogeneity.is_finite()) {
            return Err(Error::OutOfRange { value: heterogeneity, range: "[0, ∞) for heterogeneity" });
        }
        self.heterogeneity = heterogeneity;
        Ok(self)
    }

    pub fn with_theta_d(&self, theta_d: f64) -> Result<Self> {
        Self::symmetric(self.tau, theta_d)?.with_heterogeneity(self.heterogeneity)
    }

    pub fn tau(&self) -> usize {
        self.tau
    }

    pub fn channels(&self) -> &[Pmf] {
        &self.channels
    }

    pub fn heterogeneity(&self) -> f64 {
        self.heterogeneity
    }

    fn sample_column(&self, labels: &[u8], cdfs: &[Vec<f64>], seed: u64, j: usize, out: &mut [u8]) {
        let mut rng = stream_rng(seed, j as u64);
        if self.heterogeneity == 0.0 {
            for (slot, &t) in out.iter_mut().zip(labels) {
                *slot = draw_from_cdf(&cdfs[t as usize - 1], rng.gen()) as u8;
            }
            return;
        }
        let concentration = 1.0 / self.heterogeneity;
        let mut weights = vec![0.0; self.tau + 1];
        for (slot, &t) in out.iter_mut().zip(labels) {
            let q = &self.channels[t as usize - 1];
            for (w, &m) in weights.iter_mut().zip(q.mass()) {
                *w = if m > 0.0 { Gamma::new(concentration * m, 1.0).expect("positive shape").sample(&mut rng) } else { 0.0 };
            }
            let total: f64 = weights.iter().sum();
            if total <= 0.0 {
                // every gamma underflowed; fall back to the pool channel
                *slot = draw_from_cdf(&cdfs[t as usize - 1], rng.gen()) as u8;
                continue;
            }
            let u: f64 = rng.gen::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = weights.iter().rposition(|&w| w > 0.0).unwrap_or(0);
            for (s, &w) in weights.iter().enumerate() {
                acc += w;
                if u < acc {
                    pick = s;
                    break;
                }
            }
            *slot = pick as u8;
        }
    }
}

impl ResponseSource for TemporaryWorkerModel {
    fn tau(&self) -> usize {
        self.tau
    }

    fn sample(&self, labels: &ObjectSequence, n: usize, seed: u64) -> Result<ResponseMatrix> {
        check_labels(labels, self.tau, n)?;
        let ell = labels.len();
        let cdfs: Vec<Vec<f64>> = self.channels.iter().map(|q| cumulative(q.mass())).collect();
        let mut entries = vec![0u8; ell * n];
        let mut column = vec![0u8; ell];
        for j in 0..n {
            self.sample_column(labels.labels(), &cdfs, seed, j, &mut column);
            for (i, &s) in column.iter().enumerate() {
                entries[i * n + j] = s;
            }
        }
        let assignment = if self.heterogeneity > 0.0 { WorkerAssignment::PerCell } else { WorkerAssignment::PerColumn };
        ResponseMatrix::new(ell, n, self.tau + 1, entries, assignment)
    }
}
