//! Norms on `R^n`, extreme points of their unit balls, and Hilbert's
//! projective metric on the open positive cone.
//!
//! The slice `{x > 0 : x_n = 1}` with Hilbert's metric is isometric to
//! `V0 = {y : y_n = 0}` with the variation norm `max y - min y`; the
//! isometry is the coordinatewise logarithm ([`log_coords`]) and its
//! inverse is [`exp_coords`]. Variation-norm vectors therefore always
//! carry an explicit zero in the last slot.

use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, domain, Error, Result};

/// Largest dimension for which extreme points (and subset masks) are enumerated.
pub const MAX_ENUM_DIM: usize = 24;

/// Slack used when checking that a vector lies on a unit sphere or in `V0`.
pub const SPHERE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormId {
    Sup,
    L1,
    Euclid,
    /// `max_i x_i - min_j x_j`, only valid on vectors whose last entry is zero.
    Variation,
}

impl NormId {
    pub fn is_polyhedral(self) -> bool {
        !matches!(self, NormId::Euclid)
    }
}

/// A dense vector of finite reals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct RealVector(Vec<f64>);

impl RealVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return domain("vector must have at least one entry");
        }
        if let Some(i) = entries.iter().position(|v| !v.is_finite()) {
            return domain(format!("entry {i} is not finite"));
        }
        Ok(Self(entries))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n.max(1)])
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for RealVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for RealVector {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<RealVector> for Vec<f64> {
    fn from(v: RealVector) -> Self {
        v.0
    }
}

/// A point of the open positive cone: every entry finite and strictly positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ConePoint(Vec<f64>);

impl ConePoint {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        check_positive(&entries)?;
        Ok(Self(entries))
    }

    /// Rescales so that the last entry is exactly one.
    pub fn normalized(&self) -> ConePoint {
        ConePoint(normalize_last(&self.0))
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for ConePoint {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for ConePoint {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<ConePoint> for Vec<f64> {
    fn from(v: ConePoint) -> Self {
        v.0
    }
}

pub(crate) fn check_finite(v: &[f64]) -> Result<()> {
    if v.is_empty() {
        return domain("vector must have at least one entry");
    }
    match v.iter().position(|x| !x.is_finite()) {
        Some(i) => domain(format!("entry {i} is not finite")),
        None => Ok(()),
    }
}

pub(crate) fn check_positive(v: &[f64]) -> Result<()> {
    if v.is_empty() {
        return domain("cone point must have at least one entry");
    }
    match v.iter().position(|x| !(x.is_finite() && *x > 0.0)) {
        Some(i) => domain(format!("entry {i} = {} is not strictly positive and finite", v[i])),
        None => Ok(()),
    }
}

pub(crate) fn check_v0(v: &[f64]) -> Result<()> {
    let last = *v.last().ok_or_else(|| Error::Domain("empty vector".into()))?;
    if last.abs() > SPHERE_TOL {
        return domain(format!("variation norm needs last entry 0, got {last}"));
    }
    Ok(())
}

pub(crate) fn normalize_last(x: &[f64]) -> Vec<f64> {
    let last = x[x.len() - 1];
    let mut out: Vec<f64> = x.iter().map(|v| v / last).collect();
    let n = out.len();
    out[n - 1] = 1.0;
    out
}

/// Spread `max - min` of a slice; no domain checks.
pub(crate) fn spread(v: &[f64]) -> f64 {
    let (lo, hi) = v
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    hi - lo
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Norm of `v` without validation; the variation branch ignores the `V0` check.
pub(crate) fn norm_unchecked(v: &[f64], id: NormId) -> f64 {
    match id {
        NormId::Sup => v.iter().fold(0.0, |m, x| m.max(x.abs())),
        NormId::L1 => v.iter().map(|x| x.abs()).sum(),
        NormId::Euclid => {
            // scaled to avoid overflow on large entries
            let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            if scale == 0.0 {
                return 0.0;
            }
            scale * v.iter().map(|x| (x / scale).powi(2)).sum::<f64>().sqrt()
        }
        NormId::Variation => spread(v),
    }
}

pub fn norm(v: &[f64], id: NormId) -> Result<f64> {
    check_finite(v)?;
    if id == NormId::Variation {
        check_v0(v)?;
    }
    Ok(norm_unchecked(v, id))
}

/// Hilbert's projective metric `log max(x/y) - log min(x/y)`.
///
/// Ratios are taken as log differences so that entries spanning
/// `e^{±100}` and beyond neither overflow nor lose the spread.
pub fn hilbert_metric(x: &[f64], y: &[f64]) -> Result<f64> {
    check_positive(x)?;
    check_positive(y)?;
    check_dim(x.len(), y.len())?;
    Ok(hilbert_unchecked(x, y))
}

pub(crate) fn hilbert_unchecked(x: &[f64], y: &[f64]) -> f64 {
    let (lo, hi) = x.iter().zip(y).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (a, b)| {
        let r = a.ln() - b.ln();
        (lo.min(r), hi.max(r))
    });
    (hi - lo).max(0.0)
}

/// Coordinatewise logarithm of a slice point (`x_n = 1`) into `V0`.
pub fn log_coords(x: &[f64]) -> Result<RealVector> {
    check_positive(x)?;
    let last = x[x.len() - 1];
    if (last - 1.0).abs() > SPHERE_TOL {
        return domain(format!("log_coords needs last entry 1, got {last}; normalize first"));
    }
    let mut y: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let n = y.len();
    y[n - 1] = 0.0;
    Ok(RealVector(y))
}

/// Inverse of [`log_coords`].
pub fn exp_coords(y: &[f64]) -> Result<ConePoint> {
    check_finite(y)?;
    check_v0(y)?;
    let mut x = Vec::with_capacity(y.len());
    for (i, &v) in y.iter().enumerate() {
        let e = v.exp();
        if !e.is_finite() || e < f64::MIN_POSITIVE {
            return Err(Error::Overflow(format!(
                "exp({v}) at entry {i} leaves the normal floating range"
            )));
        }
        x.push(e);
    }
    let n = x.len();
    x[n - 1] = 1.0;
    Ok(ConePoint(x))
}

/// Extreme points of the closed unit ball.
///
/// * `Sup`: the `2^n` sign vectors; index `k` has `+1` in coordinate `j`
///   iff bit `j` of `k` is set.
/// * `L1`: `+e_1, -e_1, +e_2, -e_2, ...`.
/// * `Variation`: for each nonempty `I ⊆ {0..n-2}` (in mask order) the
///   indicator `1_I`, followed by all the `-1_I`; last entry zero.
pub fn extreme_points(id: NormId, n: usize) -> Result<Vec<RealVector>> {
    if n == 0 {
        return domain("dimension must be positive");
    }
    if n > MAX_ENUM_DIM {
        return Err(Error::Budget(format!(
            "extreme-point enumeration is capped at n = {MAX_ENUM_DIM}, got {n}"
        )));
    }
    let pts: Vec<Vec<f64>> = match id {
        NormId::Euclid => return Err(Error::NotEnumerable(id)),
        NormId::Sup => (0u32..1 << n)
            .map(|k| (0..n).map(|j| if k >> j & 1 == 1 { 1.0 } else { -1.0 }).collect())
            .collect(),
        NormId::L1 => (0..n)
            .flat_map(|j| {
                [1.0, -1.0].into_iter().map(move |s| {
                    let mut v = vec![0.0; n];
                    v[j] = s;
                    v
                })
            })
            .collect(),
        NormId::Variation => {
            if n < 2 {
                return domain("the variation ball needs n >= 2");
            }
            let masks = 1u32..1 << (n - 1);
            let indicator = |k: u32, s: f64| -> Vec<f64> {
                (0..n).map(|j| if j < n - 1 && k >> j & 1 == 1 { s } else { 0.0 }).collect()
            };
            masks.clone().map(|k| indicator(k, 1.0)).chain(masks.map(|k| indicator(k, -1.0))).collect()
        }
    };
    Ok(pts.into_iter().map(RealVector).collect())
}
