//! Randomized certification of eigenvectors and fixed points.
//!
//! Every detector samples points from a box, records which illumination
//! targets each sample hits, and stops as soon as every target is hit
//! (`Confirmed`) or the sample budget runs out (`Undetermined`).
//! `Undetermined` never certifies that the eigenspace or fixed-point set is
//! empty or unbounded.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::conemaps::{is_order_preserving_homogeneous_probe, MapSpec};
use crate::error::{check_dim, domain, Error, Result};
use crate::illumination::{interior_hull_certificate, strict_sign_mask};
use crate::lp;
use crate::spaces::{self, check_positive, ConePoint, RealVector, MAX_ENUM_DIM};

const PROBE_TRIALS: usize = 32;
/// Residual directions retained by the smooth detector.
pub const SMOOTH_POOL: usize = 64;
const ADVERSARIAL_TOL: f64 = 1e-9;

/// A nonempty proper subset of `{0, .., n-1}` stored as a bitmask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SubsetMask(u32);

impl SubsetMask {
    pub fn new(bits: u32, n: usize) -> Result<Self> {
        if n == 0 || n > MAX_ENUM_DIM {
            return domain(format!("subset masks need 1 <= n <= {MAX_ENUM_DIM}"));
        }
        let full = (1u32 << n) - 1;
        if bits == 0 || bits >= full {
            return domain(format!("mask {bits:#b} is not a nonempty proper subset of {n} indices"));
        }
        Ok(Self(bits))
    }

    pub fn from_indices(indices: &[usize], n: usize) -> Result<Self> {
        let mut bits = 0u32;
        for &i in indices {
            if i >= n {
                return domain(format!("index {i} out of range for n = {n}"));
            }
            bits |= 1 << i;
        }
        Self::new(bits, n)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    /// Sorted 0-based member indices.
    pub fn indices(self) -> Vec<usize> {
        (0..32).filter(|&i| self.contains(i)).collect()
    }
}

impl fmt::Display for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.indices())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectionConfig {
    pub box_radius: f64,
    pub max_samples: u64,
    pub seed: u64,
    /// Required gap between consecutive sorted log-ratios, relative to
    /// `max(1, spread)`. Also the strictness slack of the sup detector.
    pub gap_tol: f64,
}

impl Default for DetectionConfig {
    fn default() -> Self {
        Self { box_radius: 100.0, max_samples: 100_000, seed: 0, gap_tol: 1e-9 }
    }
}

impl DetectionConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.box_radius.is_finite() && self.box_radius > 0.0) {
            return domain(format!("box radius {} must be positive and finite", self.box_radius));
        }
        if !(self.gap_tol.is_finite() && self.gap_tol >= 0.0) {
            return domain(format!("gap tolerance {} must be nonnegative and finite", self.gap_tol));
        }
        Ok(())
    }

    /// Config for trial `k` of a batch: the seed is `seed + k`.
    pub fn for_trial(&self, k: u64) -> Self {
        Self { seed: self.seed.wrapping_add(k), ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DetectionStatus {
    Confirmed,
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectionKind {
    /// Targets are the nonempty proper subsets `J`; points are cone points.
    Eigenvector,
    /// Targets are the `2^n` strict sign patterns of `f(w) - w`.
    SupFixedPoint,
    /// A single target: `0 ∈ int conv` of the residuals.
    SmoothFixedPoint,
}

/// One recorded sample. For eigenvector runs `mask` is the subset `J`; for
/// sup runs it lists the strictly negative residual coordinates; for smooth
/// runs it is empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub mask: Vec<usize>,
    pub point: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionReport {
    pub status: DetectionStatus,
    pub kind: DetectionKind,
    pub dim: usize,
    pub samples_used: u64,
    pub subsets_covered: u64,
    pub total_subsets: u64,
    pub witnesses: Vec<Witness>,
    pub seed: u64,
    pub config: DetectionConfig,
}

impl DetectionReport {
    pub fn confirmed(&self) -> bool {
        self.status == DetectionStatus::Confirmed
    }

    pub fn witness_points(&self) -> Vec<Vec<f64>> {
        self.witnesses.iter().map(|w| w.point.clone()).collect()
    }

    fn build(
        kind: DetectionKind,
        dim: usize,
        config: &DetectionConfig,
        samples_used: u64,
        total: u64,
        found: BTreeMap<u32, Vec<f64>>,
    ) -> Self {
        let covered = found.len() as u64;
        let status = if covered == total { DetectionStatus::Confirmed } else { DetectionStatus::Undetermined };
        let witnesses = found
            .into_iter()
            .map(|(bits, point)| Witness { mask: (0..dim).filter(|&i| bits >> i & 1 == 1).collect(), point })
            .collect();
        Self {
            status,
            kind,
            dim,
            samples_used,
            subsets_covered: covered,
            total_subsets: total,
            witnesses,
            seed: config.seed,
            config: *config,
        }
    }
}

fn log_ratios(spec: &MapSpec, x: &[f64]) -> Result<Vec<f64>> {
    let fx = spec.eval(x)?;
    Ok(fx.iter().zip(x).map(|(f, v)| f.ln() - v.ln()).collect())
}

/// Subsets `J` with `max_{J} f(x)_j/x_j < min_{J^c} f(x)_j/x_j`.
///
/// These are exactly the lower cuts of the sorted log-ratios at a gap
/// exceeding `tau * max(1, spread)`, so there are at most `n - 1` of them.
pub fn ratio_subsets(spec: &MapSpec, x: &[f64], tau: f64) -> Result<Vec<SubsetMask>> {
    check_positive(x)?;
    let n = x.len();
    if n > MAX_ENUM_DIM {
        return Err(Error::Budget(format!("subset masks are capped at n = {MAX_ENUM_DIM}")));
    }
    let rho = log_ratios(spec, x)?;
    Ok(lower_cuts(&rho, tau).into_iter().map(SubsetMask).collect())
}

fn lower_cuts(rho: &[f64], tau: f64) -> Vec<u32> {
    let mut order: Vec<usize> = (0..rho.len()).collect();
    order.sort_by(|&a, &b| rho[a].total_cmp(&rho[b]));
    let threshold = tau * spaces::spread(rho).max(1.0);
    let mut bits = 0u32;
    let mut cuts = Vec::new();
    for k in 1..rho.len() {
        bits |= 1 << order[k - 1];
        if rho[order[k]] - rho[order[k - 1]] > threshold {
            cuts.push(bits);
        }
    }
    cuts
}

fn sample_box(rng: &mut ChaCha8Rng, n: usize, r: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-r..=r)).collect()
}

/// Samples `x = Exp(y)` with `y` uniform in `[-R, R]^{n-1} × {0}` until every
/// nonempty proper subset has a witness. Deterministic in the seed.
pub fn detect_eigenvector(spec: &MapSpec, config: &DetectionConfig) -> Result<DetectionReport> {
    config.validate()?;
    let n = spec.validate()?;
    if n > MAX_ENUM_DIM {
        return Err(Error::Budget(format!("eigenvector detection is capped at n = {MAX_ENUM_DIM}")));
    }
    if !is_order_preserving_homogeneous_probe(spec, PROBE_TRIALS, config.seed) {
        return domain("map failed the order-preserving/homogeneous probe");
    }
    let total = (1u64 << n) - 2;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut found = BTreeMap::new();
    let mut used = 0;
    while (found.len() as u64) < total && used < config.max_samples {
        used += 1;
        let mut y = sample_box(&mut rng, n - 1, config.box_radius);
        y.push(0.0);
        let x = spaces::exp_coords(&y)?;
        for cut in lower_cuts(&log_ratios(spec, &x)?, config.gap_tol) {
            found.entry(cut).or_insert_with(|| x.to_vec());
        }
    }
    log::debug!("eigenvector detection: {} of {total} subsets after {used} samples", found.len());
    Ok(DetectionReport::build(DetectionKind::Eigenvector, n, config, used, total, found))
}

fn residual<F: Fn(&[f64]) -> Vec<f64>>(f: &F, w: &[f64]) -> Result<Vec<f64>> {
    let fw = f(w);
    check_dim(w.len(), fw.len())?;
    let r: Vec<f64> = fw.iter().zip(w).map(|(a, b)| a - b).collect();
    if r.iter().any(|v| !v.is_finite()) {
        return Err(Error::Overflow("map produced a non-finite residual".into()));
    }
    Ok(r)
}

/// Fixed-point detection for a map assumed sup-norm nonexpansive on `R^n`:
/// confirmed once `f(w) - w` has realized all `2^n` strict sign patterns.
pub fn detect_fixed_point_sup<F>(f: F, n: usize, config: &DetectionConfig) -> Result<DetectionReport>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    config.validate()?;
    if n == 0 || n > MAX_ENUM_DIM {
        return domain(format!("sup detection needs 1 <= n <= {MAX_ENUM_DIM}"));
    }
    let total = 1u64 << n;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut found = BTreeMap::new();
    let mut used = 0;
    while (found.len() as u64) < total && used < config.max_samples {
        used += 1;
        let w = sample_box(&mut rng, n, config.box_radius);
        if let Some(mask) = strict_sign_mask(&residual(&f, &w)?, config.gap_tol) {
            found.entry(mask).or_insert(w);
        }
    }
    Ok(DetectionReport::build(DetectionKind::SupFixedPoint, n, config, used, total, found))
}

/// Fixed-point detection for a map assumed Euclidean-nonexpansive: confirmed
/// once 0 lies in the interior of the convex hull of sampled residuals.
///
/// Residual directions are kept in a FIFO pool of [`SMOOTH_POOL`] unit
/// vectors and the hull certificate is rerun after every `n + 1` samples.
pub fn detect_fixed_point_smooth<F>(f: F, n: usize, config: &DetectionConfig) -> Result<DetectionReport>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    config.validate()?;
    if n == 0 {
        return domain("dimension must be positive");
    }
    let capacity = SMOOTH_POOL.max(2 * (n + 1));
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut pool: VecDeque<(Vec<f64>, Vec<f64>)> = VecDeque::with_capacity(capacity);
    let mut used = 0;
    let mut since_check = 0;
    while used < config.max_samples {
        used += 1;
        let w = sample_box(&mut rng, n, config.box_radius);
        let r = residual(&f, &w)?;
        let len = spaces::dot(&r, &r).sqrt();
        if len > 0.0 {
            if pool.len() == capacity {
                pool.pop_front();
            }
            pool.push_back((r.iter().map(|v| v / len).collect(), w));
        }
        since_check += 1;
        if since_check < n + 1 || pool.len() < n + 1 {
            continue;
        }
        since_check = 0;
        let dirs: Vec<Vec<f64>> = pool.iter().map(|(d, _)| d.clone()).collect();
        let cert = interior_hull_certificate(&dirs)?;
        if cert.inside {
            let weights = cert.weights.unwrap_or_default();
            let mut found = BTreeMap::new();
            found.insert(0, Vec::new());
            let mut report = DetectionReport::build(DetectionKind::SmoothFixedPoint, n, config, used, 1, found);
            report.witnesses = pool
                .into_iter()
                .zip(weights)
                .filter(|(_, lambda)| *lambda > 0.0)
                .map(|((_, w), _)| Witness { mask: Vec::new(), point: w })
                .collect();
            return Ok(report);
        }
    }
    Ok(DetectionReport::build(DetectionKind::SmoothFixedPoint, n, config, used, 1, BTreeMap::new()))
}

/// A Euclidean-nonexpansive affine map `f(x) = ⟨phi, x⟩ z - c z` with no
/// fixed point whose residuals at the base points `w_i` are prescribed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdversarialMap {
    pub phi: RealVector,
    pub z: RealVector,
    pub c: f64,
    pub base_points: Vec<RealVector>,
}

impl AdversarialMap {
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let s = spaces::dot(&self.phi, x) - self.c;
        self.z.iter().map(|zj| s * zj).collect()
    }
}

/// Builds the map with `f(w_i) = 0` at `w_i = -v_i`, so that the residual at
/// `w_i` is exactly `v_i`. Requires `1 <= m <= n` and `c > 0`.
pub fn build_adversarial_euclid(vs: &[Vec<f64>], c: f64) -> Result<AdversarialMap> {
    let n = vs.first().map(Vec::len).ok_or_else(|| Error::Construction("no residual vectors".into()))?;
    if vs.len() > n {
        return Err(Error::Construction(format!("need at most n = {n} vectors, got {}", vs.len())));
    }
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::Construction(format!("offset c = {c} must be positive")));
    }
    let mut ws = Vec::with_capacity(vs.len());
    for v in vs {
        check_dim(n, v.len())?;
        spaces::check_finite(v)?;
        ws.push(v.iter().map(|x| -x).collect::<Vec<f64>>());
    }
    // minimum-norm solution of W phi = c 1: phi = W^T (W W^T)^{-1} c 1
    let gram: Vec<Vec<f64>> = ws.iter().map(|a| ws.iter().map(|b| spaces::dot(a, b)).collect()).collect();
    let alpha = lp::solve_linear(&gram, &vec![c; ws.len()])
        .ok_or_else(|| Error::Construction("base points are linearly dependent; perturb them".into()))?;
    let phi: Vec<f64> = (0..n).map(|j| ws.iter().zip(&alpha).map(|(w, a)| a * w[j]).sum()).collect();
    if ws.iter().any(|w| (spaces::dot(&phi, w) - c).abs() > ADVERSARIAL_TOL * c.max(1.0)) {
        return Err(Error::Construction("inconsistent base points; perturb them".into()));
    }
    let len2 = spaces::dot(&phi, &phi);
    let z: Vec<f64> = phi.iter().map(|p| p / len2).collect();
    Ok(AdversarialMap {
        phi: RealVector::new(phi)?,
        z: RealVector::new(z)?,
        c,
        base_points: ws.into_iter().map(RealVector::new).collect::<Result<_>>()?,
    })
}

/// Checks every stored eigenvector witness against its mask with a gap
/// larger than `tau / 2`.
pub fn revalidate_witnesses(spec: &MapSpec, report: &DetectionReport, tau: f64) -> Result<bool> {
    for w in &report.witnesses {
        let mask = SubsetMask::from_indices(&w.mask, report.dim)?;
        let x = ConePoint::new(w.point.clone())?;
        let rho = log_ratios(spec, &x)?;
        let threshold = 0.5 * tau * spaces::spread(&rho).max(1.0);
        let inside = (0..rho.len()).filter(|&j| mask.contains(j)).map(|j| rho[j]).fold(f64::NEG_INFINITY, f64::max);
        let outside = (0..rho.len()).filter(|&j| !mask.contains(j)).map(|j| rho[j]).fold(f64::INFINITY, f64::min);
        if !(outside - inside > threshold) {
            return Ok(false);
        }
    }
    Ok(true)
}
