//! Finite-alphabet pmfs and the f-divergence family.
//!
//! All quantities are in bits. `δ` is the half-L1 total variation, so the
//! f-divergence generated by `|x − 1|` equals `2δ`.
//!
//! Smoothness constants of an [`FDivergenceSpec`] follow the base-2
//! normalization: on the ratio range `[r, R]` of a pair,
//!
//! - `c ≤ ln2 · x f''(x) ≤ C`, which yields `c·D(p‖q) ≤ D_f(p‖q) ≤ C·D(p‖q)` with KL in bits;
//! - `L ≥ sup f' − inf f'`, which yields `D_f(p‖q) ≤ L·δ(p,q)`;
//! - `κ = 2c·log₂e`, which yields `κ·δ² ≤ D_f(p‖q)` through Pinsker.
//!
//! Under this normalization KL has `c = C = 1` and `κ` is exactly the Pinsker
//! constant.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize};

use crate::{Error, Result};

pub const LOG2_E: f64 = std::f64::consts::LOG2_E;
const LN_2: f64 = std::f64::consts::LN_2;
const MASS_TOL: f64 = 1e-12;

/// A probability mass function over symbols `0..len`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Pmf(Vec<f64>);

impl Pmf {
    pub fn new(mass: Vec<f64>) -> Result<Self> {
        if mass.is_empty() {
            return Err(Error::Empty("pmf"));
        }
        if let Some(&m) = mass.iter().find(|m| !(**m >= 0.0)) {
            return Err(Error::NegativeMass(m));
        }
        let total: f64 = mass.iter().sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::NotNormalized(total));
        }
        Ok(Self(mass))
    }

    /// Normalize nonnegative weights.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(Error::NotNormalized(total));
        }
        Self::new(weights.iter().map(|w| w / total).collect())
    }

    pub fn uniform(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::Empty("pmf"));
        }
        Ok(Self(vec![1.0 / size as f64; size]))
    }

    pub fn point_mass(size: usize, at: usize) -> Result<Self> {
        if at >= size {
            return Err(Error::SymbolOutOfRange { symbol: at, size });
        }
        let mut mass = vec![0.0; size];
        mass[at] = 1.0;
        Ok(Self(mass))
    }

    pub fn mass(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<'de> Deserialize<'de> for Pmf {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Pmf::new(Vec::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

impl std::ops::Index<usize> for Pmf {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Empirical distribution of `samples` over `0..alphabet_size`.
pub fn empirical_pmf(samples: &[usize], alphabet_size: usize) -> Result<Pmf> {
    if samples.is_empty() {
        return Err(Error::Empty("sample set"));
    }
    let mut counts = vec![0u64; alphabet_size];
    for &s in samples {
        *counts.get_mut(s).ok_or(Error::SymbolOutOfRange { symbol: s, size: alphabet_size })? += 1;
    }
    Ok(pmf_from_counts(&counts))
}

pub(crate) fn pmf_from_counts(counts: &[u64]) -> Pmf {
    let n: u64 = counts.iter().sum();
    Pmf(counts.iter().map(|&c| c as f64 / n as f64).collect())
}

fn same_size(p: &Pmf, q: &Pmf) -> Result<()> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch(p.len(), q.len()));
    }
    Ok(())
}

/// Total variation `δ(p,q) = ½ Σ |p_i − q_i|`.
pub fn tv_distance(p: &Pmf, q: &Pmf) -> Result<f64> {
    same_size(p, q)?;
    Ok(tv_unchecked(p.mass(), q.mass()))
}

pub(crate) fn tv_unchecked(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// KL divergence in bits; `+∞` when `p` puts mass where `q` has none.
pub fn kl_divergence(p: &Pmf, q: &Pmf) -> Result<f64> {
    same_size(p, q)?;
    Ok(kl_unchecked(p.mass(), q.mass()))
}

pub(crate) fn kl_unchecked(p: &[f64], q: &[f64]) -> f64 {
    let mut total = 0.0;
    for (&a, &b) in p.iter().zip(q) {
        if a == 0.0 {
            continue;
        }
        if b == 0.0 {
            return f64::INFINITY;
        }
        total += a * (a / b).log2();
    }
    total.max(0.0)
}

/// Which member of the family a spec denotes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FDivergenceKind {
    TotalVariation,
    Kl,
    Custom,
}

type Generator = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A convex normalized generator `f` with its smoothness constants.
#[derive(Clone)]
pub struct FDivergenceSpec {
    kind: FDivergenceKind,
    name: String,
    generator: Generator,
    /// Limit of `f(x)/x` as `x → ∞`; governs terms with `q_i = 0`.
    slope_at_infinity: f64,
    c: f64,
    upper_c: f64,
    lipschitz: f64,
}

impl fmt::Debug for FDivergenceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FDivergenceSpec")
            .field("name", &self.name)
            .field("c", &self.c)
            .field("C", &self.upper_c)
            .field("L", &self.lipschitz)
            .finish()
    }
}

impl FDivergenceSpec {
    /// `f(x) = |x − 1|`. Curvature constants do not apply (`c = 0`, `C = ∞`); `L = 2`.
    pub fn total_variation() -> Self {
        Self {
            kind: FDivergenceKind::TotalVariation,
            name: "total_variation".into(),
            generator: Arc::new(|x: f64| (x - 1.0).abs()),
            slope_at_infinity: 1.0,
            c: 0.0,
            upper_c: f64::INFINITY,
            lipschitz: 2.0,
        }
    }

    /// `f(x) = x log₂ x` with caller-supplied `L`; `c = C = 1` in base-2 normalization.
    pub fn kl(lipschitz: f64) -> Result<Self> {
        Self::build(FDivergenceKind::Kl, "kl", Arc::new(|x: f64| if x == 0.0 { 0.0 } else { x * x.log2() }), f64::INFINITY, 1.0, 1.0, lipschitz)
    }

    /// KL with `L` set to the derivative oscillation `log₂(R/r)` on `[r, R]`.
    pub fn kl_on_range(r: f64, upper_r: f64) -> Result<Self> {
        if !(r > 0.0 && upper_r >= r && upper_r.is_finite()) {
            return Err(Error::InvalidConstants(format!("ratio range [{r}, {upper_r}]")));
        }
        Self::kl((upper_r / r).log2())
    }

    /// A user generator. `slope_at_infinity` is `lim f(x)/x` (use `f64::INFINITY` for superlinear `f`).
    pub fn custom<F>(name: &str, f: F, slope_at_infinity: f64, c: f64, upper_c: f64, lipschitz: f64) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::build(FDivergenceKind::Custom, name, Arc::new(f), slope_at_infinity, c, upper_c, lipschitz)
    }

    fn build(
        kind: FDivergenceKind,
        name: &str,
        generator: Generator,
        slope_at_infinity: f64,
        c: f64,
        upper_c: f64,
        lipschitz: f64,
    ) -> Result<Self> {
        let at_one = generator(1.0);
        if at_one.abs() > 1e-12 {
            return Err(Error::GeneratorNotNormalized(at_one));
        }
        if !(c > 0.0 && c <= upper_c && upper_c.is_finite() && lipschitz.is_finite() && lipschitz >= 0.0) {
            return Err(Error::InvalidConstants(format!("need 0 < c ≤ C < ∞ and 0 ≤ L < ∞, got c={c}, C={upper_c}, L={lipschitz}")));
        }
        Ok(Self { kind, name: name.into(), generator, slope_at_infinity, c, upper_c, lipschitz })
    }

    pub fn kind(&self) -> FDivergenceKind {
        self.kind
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.generator)(x)
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn upper_c(&self) -> f64 {
        self.upper_c
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn kappa(&self) -> f64 {
        2.0 * self.c * LOG2_E
    }

    /// Check the constants against `f` on `[r, R]` by sampling 10³ points.
    ///
    /// Derivatives are central differences, so the comparison carries a
    /// relative slack of `1e-5`.
    pub fn validate_constants(&self, r: f64, upper_r: f64) -> Result<()> {
        if self.kind == FDivergenceKind::TotalVariation {
            return Ok(());
        }
        if !(r > 0.0 && upper_r >= r && upper_r.is_finite()) {
            return Err(Error::InvalidConstants(format!("ratio range [{r}, {upper_r}]")));
        }
        const POINTS: usize = 1000;
        let slack = |v: f64| 1e-5 * v.abs().max(1.0);
        let (mut d1_min, mut d1_max) = (f64::INFINITY, f64::NEG_INFINITY);
        for k in 0..POINTS {
            let x = if upper_r == r { r } else { r * (upper_r / r).powf(k as f64 / (POINTS - 1) as f64) };
            let h = 1e-4 * x;
            let (lo, mid, hi) = (self.eval(x - h), self.eval(x), self.eval(x + h));
            let second = (hi - 2.0 * mid + lo) / (h * h);
            let curvature = LN_2 * x * second;
            if curvature < self.c - slack(self.c) || curvature > self.upper_c + slack(self.upper_c) {
                return Err(Error::InvalidConstants(format!(
                    "ln2·x f''(x) = {curvature} outside [{}, {}] at x = {x}",
                    self.c, self.upper_c
                )));
            }
            let first = (hi - lo) / (2.0 * h);
            d1_min = d1_min.min(first);
            d1_max = d1_max.max(first);
        }
        let oscillation = d1_max - d1_min;
        if oscillation > self.lipschitz + slack(self.lipschitz) {
            return Err(Error::InvalidConstants(format!(
                "derivative oscillation {oscillation} exceeds L = {}",
                self.lipschitz
            )));
        }
        Ok(())
    }
}

/// `D_f(p‖q) = Σ q_i f(p_i/q_i)`.
///
/// A term with `q_i = 0 < p_i` contributes `p_i · lim f(x)/x`: `+∞` for KL,
/// `p_i` for total variation. Terms with `p_i = q_i = 0` contribute nothing.
pub fn f_divergence(spec: &FDivergenceSpec, p: &Pmf, q: &Pmf) -> Result<f64> {
    same_size(p, q)?;
    Ok(f_divergence_unchecked(spec, p.mass(), q.mass()))
}

pub(crate) fn f_divergence_unchecked(spec: &FDivergenceSpec, p: &[f64], q: &[f64]) -> f64 {
    match spec.kind {
        FDivergenceKind::TotalVariation => return 2.0 * tv_unchecked(p, q),
        FDivergenceKind::Kl => return kl_unchecked(p, q),
        FDivergenceKind::Custom => {}
    }
    let mut total = 0.0;
    for (&a, &b) in p.iter().zip(q) {
        if b == 0.0 {
            if a > 0.0 {
                total += a * spec.slope_at_infinity;
            }
            continue;
        }
        total += b * spec.eval(a / b);
    }
    total.max(0.0)
}

/// Outcome of [`check_bounds`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundReport {
    pub pinsker_ok: bool,
    pub sandwich_ok: bool,
    pub lipschitz_ok: bool,
    pub kl: f64,
    pub tv: f64,
    pub f_div: f64,
}

impl BoundReport {
    pub fn all_ok(&self) -> bool {
        self.pinsker_ok && self.sandwich_ok && self.lipschitz_ok
    }
}

const BOUND_SLACK: f64 = 1e-9;

/// Evaluate Pinsker, the curvature sandwich and the κδ² ≤ D_f ≤ Lδ bracket.
pub fn check_bounds(spec: &FDivergenceSpec, p: &Pmf, q: &Pmf) -> Result<BoundReport> {
    same_size(p, q)?;
    for (i, (&a, &b)) in p.mass().iter().zip(q.mass()).enumerate() {
        if a <= 0.0 || b <= 0.0 {
            return Err(Error::ZeroMass(i));
        }
    }
    let kl = kl_unchecked(p.mass(), q.mass());
    let tv = tv_unchecked(p.mass(), q.mass());
    let f_div = f_divergence_unchecked(spec, p.mass(), q.mass());
    let upper = if spec.upper_c.is_infinite() { f64::INFINITY } else { spec.upper_c * kl };
    Ok(BoundReport {
        pinsker_ok: kl + BOUND_SLACK >= 2.0 * LOG2_E * tv * tv,
        sandwich_ok: spec.c * kl <= f_div + BOUND_SLACK && f_div <= upper + BOUND_SLACK,
        lipschitz_ok: spec.kappa() * tv * tv <= f_div + BOUND_SLACK && f_div <= spec.lipschitz * tv + BOUND_SLACK,
        kl,
        tv,
        f_div,
    })
}

/// Smallest and largest `p_i / q_i` over a strictly positive pair.
pub fn ratio_range(p: &Pmf, q: &Pmf) -> Result<(f64, f64)> {
    same_size(p, q)?;
    let mut range = (f64::INFINITY, 0.0f64);
    for (i, (&a, &b)) in p.mass().iter().zip(q.mass()).enumerate() {
        if a <= 0.0 || b <= 0.0 {
            return Err(Error::ZeroMass(i));
        }
        range.0 = range.0.min(a / b);
        range.1 = range.1.max(a / b);
    }
    Ok(range)
}
