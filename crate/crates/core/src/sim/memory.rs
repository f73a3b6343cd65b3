use rand::Rng;
use serde::{Deserialize, Serialize};

use super::temporary::{check_channels, symmetric_channels};
use super::{check_labels, ResponseMatrix, ResponseSource, WorkerAssignment};
use crate::divergence::Pmf;
use crate::info::binary_entropy_unchecked;
use crate::info::inverse_binary_entropy;
use crate::partition::ObjectSequence;
use crate::rng::stream_rng;
use crate::{Error, Result};

const BISECTION_TOL: f64 = 1e-10;

/// How a long-term worker's answer to object `i` depends on its own history.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MemoryKernel {
    /// With probability `copy_prob`, repeat one of the `ζ` most recent same-class
    /// answers (uniformly); otherwise draw fresh from `Q_t`. Marginals are exactly `Q_t`.
    SameClassCopy { copy_prob: f64 },
    /// As [`MemoryKernel::SameClassCopy`], and additionally repeat the previous
    /// answer with probability `previous_prob`. Marginals drift from `Q_t` when
    /// the previous object belongs to another class.
    FullMarkov { copy_prob: f64, previous_prob: f64 },
    /// Binary answers; the first answer per class is uniform, later ones repeat
    /// the same-class predecessor with probability `½ + epsilon`.
    Inertial { epsilon: f64 },
    /// Two classes, binary answers. First answer per class matches the class
    /// with probability `p`; afterwards class 1 keeps answer 1 with probability
    /// `a` and switches 2 → 1 with probability `1 − b`, mirrored for class 2.
    Unified { p: f64, a: f64, b: f64 },
}

/// Long-term workers with memory of their own earlier answers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MemoryConfig", into = "MemoryConfig")]
pub struct MemoryWorkerModel {
    tau: usize,
    base_channels: Vec<Pmf>,
    memory_depth: usize,
    kernel: MemoryKernel,
}

#[derive(Serialize, Deserialize)]
struct MemoryConfig {
    tau: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    base_channels: Option<Vec<Pmf>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    theta_d: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    copy_prob: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    theta_m: Option<f64>,
    #[serde(default = "default_depth")]
    memory_depth: usize,
    variant: VariantConfig,
}

fn default_depth() -> usize {
    1
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum VariantConfig {
    SameClassCopy,
    FullMarkov {
        previous_prob: f64,
    },
    Inertial {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        epsilon: Option<f64>,
    },
    Unified {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        p: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        a: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        b: Option<f64>,
    },
}

fn exactly_one<T, U>(x: Option<T>, y: Option<U>, what: &str) -> Result<std::result::Result<T, U>> {
    match (x, y) {
        (Some(x), None) => Ok(Ok(x)),
        (None, Some(y)) => Ok(Err(y)),
        _ => Err(Error::InvalidModel(format!("give exactly one of {what}"))),
    }
}

impl TryFrom<MemoryConfig> for MemoryWorkerModel {
    type Error = Error;

    fn try_from(c: MemoryConfig) -> Result<Self> {
        let model = match c.variant {
            VariantConfig::SameClassCopy | VariantConfig::FullMarkov { .. } => {
                let channels = match exactly_one(c.base_channels, c.theta_d, "`base_channels` or `theta_d`")? {
                    Ok(ch) => ch,
                    Err(theta) => symmetric_channels(c.tau, theta)?,
                };
                let rho = c.copy_prob.unwrap_or(0.0);
                let base = match c.variant {
                    VariantConfig::FullMarkov { previous_prob } => Self::full_markov(channels, rho, previous_prob, c.memory_depth)?,
                    _ => Self::same_class_copy(channels, rho, c.memory_depth)?,
                };
                match (c.copy_prob, c.theta_m) {
                    (Some(_), None) => base,
                    (None, Some(theta)) => base.with_theta_m(theta)?,
                    _ => return Err(Error::InvalidModel("give exactly one of `copy_prob` or `theta_m`".into())),
                }
            }
            VariantConfig::Inertial { epsilon } => {
                if c.base_channels.is_some() || c.theta_d.is_some() {
                    return Err(Error::InvalidModel("inertial channels are fixed; drop `base_channels`/`theta_d`".into()));
                }
                let eps = match exactly_one(epsilon, c.theta_m, "`epsilon` or `theta_m`")? {
                    Ok(eps) => eps,
                    Err(theta) => inertial_epsilon(theta)?,
                };
                Self::inertial(c.tau, eps)?
            }
            VariantConfig::Unified { p, a, b } => {
                let p = match exactly_one(p, c.theta_d, "`p` or `theta_d`")? {
                    Ok(p) => p,
                    Err(theta) => 0.5 * (1.0 + theta),
                };
                match (a, b, c.theta_m) {
                    (Some(a), Some(b), None) => Self::unified(p, a, b)?,
                    (None, None, Some(theta)) => Self::unified_from_qualities(2.0 * p - 1.0, theta)?,
                    _ => return Err(Error::InvalidModel("unified needs both `a` and `b`, or `theta_m`".into())),
                }
            }
        };
        if model.tau != c.tau {
            return Err(Error::InvalidModel(format!("τ = {} but the model has {} classes", c.tau, model.tau)));
        }
        if model.memory_depth != c.memory_depth {
            return Err(Error::InvalidModel(format!("this variant needs memory_depth = {}", model.memory_depth)));
        }
        Ok(model)
    }
}

impl From<MemoryWorkerModel> for MemoryConfig {
    fn from(m: MemoryWorkerModel) -> Self {
        let mut c = MemoryConfig {
            tau: m.tau,
            base_channels: None,
            theta_d: None,
            copy_prob: None,
            theta_m: None,
            memory_depth: m.memory_depth,
            variant: VariantConfig::SameClassCopy,
        };
        match m.kernel {
            MemoryKernel::SameClassCopy { copy_prob } => {
                c.base_channels = Some(m.base_channels);
                c.copy_prob = Some(copy_prob);
            }
            MemoryKernel::FullMarkov { copy_prob, previous_prob } => {
                c.base_channels = Some(m.base_channels);
                c.copy_prob = Some(copy_prob);
                c.variant = VariantConfig::FullMarkov { previous_prob };
            }
            MemoryKernel::Inertial { epsilon } => c.variant = VariantConfig::Inertial { epsilon: Some(epsilon) },
            MemoryKernel::Unified { p, a, b } => c.variant = VariantConfig::Unified { p: Some(p), a: Some(a), b: Some(b) },
        }
        c
    }
}

fn check_prob(x: f64, range: &'static str, ok: bool) -> Result<()> {
    if ok && x.is_finite() {
        Ok(())
    } else {
        Err(Error::OutOfRange { value: x, range })
    }
}

/// `ε = ½ − h⁻¹(1 − 2θ_m)`, the inertial strength whose one-step information is `2θ_m`.
fn inertial_epsilon(theta_m: f64) -> Result<f64> {
    check_prob(theta_m, "[0, ½] for θ_m", (0.0..=0.5).contains(&theta_m))?;
    Ok(0.5 - inverse_binary_entropy(1.0 - 2.0 * theta_m)?)
}

/// `I(Y; Y')` when `Y' ~ q` and `Y` copies `Y'` with probability `rho`, else is a fresh draw from `q`.
fn copy_pair_mi(q: &[f64], rho: f64) -> f64 {
    let mut mi = 0.0;
    for (y0, &q0) in q.iter().enumerate() {
        for (y1, &q1) in q.iter().enumerate() {
            let cond = (1.0 - rho) * q1 + if y0 == y1 { rho } else { 0.0 };
            let joint = q0 * cond;
            if joint > 0.0 {
                mi += joint * (cond / q1).log2();
            }
        }
    }
    mi.max(0.0)
}

/// `b` from the stationarity condition `a·p + (1−b)(1−p) = p`.
fn unified_b(p: f64, a: f64) -> f64 {
    1.0 - p * (1.0 - a) / (1.0 - p)
}

fn unified_info(p: f64, a: f64, b: f64) -> f64 {
    binary_entropy_unchecked(p) - p * binary_entropy_unchecked(a) - (1.0 - p) * binary_entropy_unchecked(b)
}

/// Solve the unified channel for `(a, b)`: stationary at `p` with one-step information `2·theta_m`.
///
/// `a` is found by bisection on `[p, 1]`; the achievable range is `θ_m ∈ [0, h(p)/2]`.
pub fn solve_unified_channel(p: f64, theta_m: f64) -> Result<(f64, f64)> {
    check_prob(p, "[½, 1) for p", (0.5..1.0).contains(&p))?;
    let target = 2.0 * theta_m;
    let top = binary_entropy_unchecked(p);
    if !(0.0..=top + 1e-12).contains(&target) {
        return Err(Error::Infeasible(format!("θ_m = {theta_m} exceeds h(p)/2 = {}", top / 2.0)));
    }
    let (mut lo, mut hi) = (p, 1.0f64);
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if unified_info(p, mid, unified_b(p, mid)) < target { lo = mid } else { hi = mid }
    }
    let a = 0.5 * (lo + hi);
    Ok((a, unified_b(p, a).clamp(0.0, 1.0)))
}

impl MemoryWorkerModel {
    pub fn same_class_copy(base_channels: Vec<Pmf>, copy_prob: f64, memory_depth: usize) -> Result<Self> {
        Self::full_markov(base_channels, copy_prob, 0.0, memory_depth).map(|mut m| {
            m.kernel = MemoryKernel::SameClassCopy { copy_prob };
            m
        })
    }

    pub fn full_markov(base_channels: Vec<Pmf>, copy_prob: f64, previous_prob: f64, memory_depth: usize) -> Result<Self> {
        let tau = check_channels(&base_channels)?;
        check_prob(copy_prob, "[0, 1) for copy_prob", (0.0..1.0).contains(&copy_prob))?;
        check_prob(previous_prob, "[0, 1 − copy_prob) for previous_prob", previous_prob >= 0.0 && copy_prob + previous_prob < 1.0)?;
        if memory_depth == 0 {
            return Err(Error::InvalidModel("memory_depth must be at least 1".into()));
        }
        Ok(Self { tau, base_channels, memory_depth, kernel: MemoryKernel::FullMarkov { copy_prob, previous_prob } })
    }

    /// The inertial channel over answers `{1, 2}` for `tau ≥ 2` classes.
    pub fn inertial(tau: usize, epsilon: f64) -> Result<Self> {
        check_prob(epsilon, "[0, ½] for ε", (0.0..=0.5).contains(&epsilon))?;
        if tau < 2 {
            return Err(Error::InvalidModel("inertial workers need τ ≥ 2".into()));
        }
        let mut half = vec![0.0; tau + 1];
        half[1] = 0.5;
        half[2] = 0.5;
        let q = Pmf::new(half)?;
        Ok(Self { tau, base_channels: vec![q; tau], memory_depth: 1, kernel: MemoryKernel::Inertial { epsilon } })
    }

    pub fn unified(p: f64, a: f64, b: f64) -> Result<Self> {
        check_prob(p, "[½, 1) for p", (0.5..1.0).contains(&p))?;
        check_prob(a, "[0, 1] for a", (0.0..=1.0).contains(&a))?;
        check_prob(b, "[0, 1] for b", (0.0..=1.0).contains(&b))?;
        let drift = a * p + (1.0 - b) * (1.0 - p) - p;
        if drift.abs() > 1e-9 {
            return Err(Error::InvalidModel(format!("(a, b) = ({a}, {b}) is not stationary at p = {p}")));
        }
        let base_channels = vec![Pmf::new(vec![0.0, p, 1.0 - p])?, Pmf::new(vec![0.0, 1.0 - p, p])?];
        Ok(Self { tau: 2, base_channels, memory_depth: 1, kernel: MemoryKernel::Unified { p, a, b } })
    }

    /// Unified channel with `δ(Q₁, Q₂) = theta_d` and one-step information `2·theta_m`.
    pub fn unified_from_qualities(theta_d: f64, theta_m: f64) -> Result<Self> {
        check_prob(theta_d, "[0, 1) for θ_d", (0.0..1.0).contains(&theta_d))?;
        let p = 0.5 * (1.0 + theta_d);
        let (a, b) = solve_unified_channel(p, theta_m)?;
        Self::unified(p, a, b)
    }

    pub fn tau(&self) -> usize {
        self.tau
    }

    pub fn base_channels(&self) -> &[Pmf] {
        &self.base_channels
    }

    pub fn memory_depth(&self) -> usize {
        self.memory_depth
    }

    pub fn kernel(&self) -> MemoryKernel {
        self.kernel
    }

    /// Rebuild the class channels so that the minimum pairwise δ is `theta_d`.
    ///
    /// Copy kernels get symmetric channels; the unified kernel keeps its one-step information.
    pub fn with_theta_d(&self, theta_d: f64) -> Result<Self> {
        match self.kernel {
            MemoryKernel::SameClassCopy { copy_prob } => {
                Self::same_class_copy(symmetric_channels(self.tau, theta_d)?, copy_prob, self.memory_depth)
            }
            MemoryKernel::FullMarkov { copy_prob, previous_prob } => {
                Self::full_markov(symmetric_channels(self.tau, theta_d)?, copy_prob, previous_prob, self.memory_depth)
            }
            MemoryKernel::Inertial { .. } => Err(Error::InvalidModel("inertial channels have fixed marginals".into())),
            MemoryKernel::Unified { p, a, b } => Self::unified_from_qualities(theta_d, unified_info(p, a, b) / 2.0),
        }
    }

    /// Set the memory strength so that the one-step same-class information
    /// `I(Y_i; Y_ĩ)` is `2·theta_m` (minimum over classes for copy kernels).
    pub fn with_theta_m(&self, theta_m: f64) -> Result<Self> {
        match self.kernel {
            MemoryKernel::SameClassCopy { .. } => {
                let rho = self.copy_prob_for(theta_m)?;
                Self::same_class_copy(self.base_channels.clone(), rho, self.memory_depth)
            }
            MemoryKernel::FullMarkov { previous_prob, .. } => {
                let rho = self.copy_prob_for(theta_m)?;
                Self::full_markov(self.base_channels.clone(), rho, previous_prob, self.memory_depth)
            }
            MemoryKernel::Inertial { .. } => Self::inertial(self.tau, inertial_epsilon(theta_m)?),
            MemoryKernel::Unified { p, .. } => Self::unified_from_qualities(2.0 * p - 1.0, theta_m),
        }
    }

    fn copy_prob_for(&self, theta_m: f64) -> Result<f64> {
        let target = 2.0 * theta_m;
        let weakest = |rho: f64| self.base_channels.iter().map(|q| copy_pair_mi(q.mass(), rho)).fold(f64::INFINITY, f64::min);
        if !(target >= 0.0) || weakest(1.0) < target {
            return Err(Error::Infeasible(format!("θ_m = {theta_m} is beyond what copying can reach for these channels")));
        }
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        while hi - lo > BISECTION_TOL {
            let mid = 0.5 * (lo + hi);
            if weakest(mid) < target { lo = mid } else { hi = mid }
        }
        // copy_prob must stay below 1
        Ok((0.5 * (lo + hi)).min(1.0 - 1e-12))
    }

    /// Most recent `ζ` same-class indices before each position, newest first.
    pub(crate) fn same_class_history(&self, labels: &[u8]) -> Vec<Vec<usize>> {
        (0..labels.len())
            .map(|i| (0..i).rev().filter(|&k| labels[k] == labels[i]).take(self.memory_depth).collect())
            .collect()
    }

    /// `P(Y_i = · | history)` written into `out` (length `τ + 1`).
    ///
    /// `history[k]` is the column's answer to object `k < i`; `same` lists the
    /// same-class indices from [`Self::same_class_history`].
    pub(crate) fn conditional(&self, t: u8, i: usize, history: &[u8], same: &[usize], out: &mut [f64]) {
        let q = self.base_channels[t as usize - 1].mass();
        match self.kernel {
            MemoryKernel::SameClassCopy { copy_prob } => self.copy_mixture(q, copy_prob, 0.0, i, history, same, out),
            MemoryKernel::FullMarkov { copy_prob, previous_prob } => {
                self.copy_mixture(q, copy_prob, previous_prob, i, history, same, out)
            }
            MemoryKernel::Inertial { epsilon } => {
                out.fill(0.0);
                match same.first() {
                    None => {
                        out[1] = 0.5;
                        out[2] = 0.5;
                    }
                    Some(&k) => {
                        let prev = history[k] as usize;
                        out[prev] = 0.5 + epsilon;
                        out[3 - prev] = 0.5 - epsilon;
                    }
                }
            }
            MemoryKernel::Unified { p, a, b } => {
                out.fill(0.0);
                let t = t as usize;
                let other = 3 - t;
                let keep = match same.first() {
                    None => p,
                    Some(&k) if history[k] as usize == t => a,
                    Some(_) => 1.0 - b,
                };
                out[t] = keep;
                out[other] = 1.0 - keep;
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn copy_mixture(&self, q: &[f64], rho: f64, sigma: f64, i: usize, history: &[u8], same: &[usize], out: &mut [f64]) {
        let rho = if same.is_empty() { 0.0 } else { rho };
        let sigma = if i == 0 { 0.0 } else { sigma };
        let fresh = 1.0 - rho - sigma;
        for (o, &m) in out.iter_mut().zip(q) {
            *o = fresh * m;
        }
        for &k in same {
            out[history[k] as usize] += rho / same.len() as f64;
        }
        if sigma > 0.0 {
            out[history[i - 1] as usize] += sigma;
        }
    }
}

impl ResponseSource for MemoryWorkerModel {
    fn tau(&self) -> usize {
        self.tau
    }

    fn sample(&self, labels: &ObjectSequence, n: usize, seed: u64) -> Result<ResponseMatrix> {
        check_labels(labels, self.tau, n)?;
        let ell = labels.len();
        let same = self.same_class_history(labels.labels());
        let mut entries = vec![0u8; ell * n];
        let mut history = vec![0u8; ell];
        let mut pmf = vec![0.0; self.tau + 1];
        for j in 0..n {
            let mut rng = stream_rng(seed, j as u64);
            for (i, &t) in labels.labels().iter().enumerate() {
                self.conditional(t, i, &history, &same[i], &mut pmf);
                let u: f64 = rng.gen();
                let mut acc = 0.0;
                let mut pick = pmf.iter().rposition(|&m| m > 0.0).unwrap_or(0);
                for (s, &m) in pmf.iter().enumerate() {
                    acc += m;
                    if u < acc {
                        pick = s;
                        break;
                    }
                }
                history[i] = pick as u8;
                entries[i * n + j] = pick as u8;
            }
        }
        ResponseMatrix::new(ell, n, self.tau + 1, entries, WorkerAssignment::PerColumn)
    }
}

/// Fresh responses for the sequence reordered so that position `p` holds object `permutation[p]`.
///
/// Memory follows the new order. Row `p` of the matrix answers object `permutation[p]`.
pub fn resample_permutation<S: ResponseSource + ?Sized>(
    model: &S,
    labels: &ObjectSequence,
    permutation: &[usize],
    n: usize,
    seed: u64,
) -> Result<(ObjectSequence, ResponseMatrix)> {
    let permuted = labels.permuted(permutation)?;
    let responses = model.sample(&permuted, n, seed)?;
    Ok((permuted, responses))
}
