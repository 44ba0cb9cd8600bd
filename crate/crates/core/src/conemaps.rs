//! Order-preserving, homogeneous maps on the open positive cone.
//!
//! Maps are described by a [`MapSpec`] tree built from weighted power means,
//! Schoen's population map, the three-branch triangle map, nonnegative
//! matrices, and closure under composition, sums and positive scaling.
//! Every node is order-preserving and homogeneous of degree one, so every
//! spec is nonexpansive in Hilbert's metric.

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{check_dim, domain, Error, Result};
use crate::spaces::{self, check_positive, hilbert_unchecked, normalize_last, ConePoint, RealVector, SPHERE_TOL};

/// Tolerance on `Σσ = 1` for mean weights built in code.
pub const SIGMA_TOL: f64 = 1e-12;

/// One `coeff · M_{r,σ}(x)` term of a mean-sum coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanTerm {
    /// Exponent in `[-inf, +inf]`; JSON accepts `"inf"` / `"-inf"`.
    #[serde(serialize_with = "ser_ext", deserialize_with = "de_ext")]
    pub r: f64,
    pub sigma: Vec<f64>,
    pub coeff: f64,
}

fn ser_ext<S: Serializer>(r: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if r.is_infinite() {
        s.serialize_str(if *r > 0.0 { "inf" } else { "-inf" })
    } else {
        s.serialize_f64(*r)
    }
}

fn de_ext<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Str(String),
    }
    match Raw::deserialize(d)? {
        Raw::Num(v) => Ok(v),
        Raw::Str(s) => match s.as_str() {
            "inf" | "+inf" | "infinity" => Ok(f64::INFINITY),
            "-inf" | "-infinity" => Ok(f64::NEG_INFINITY),
            other => Err(serde::de::Error::custom(format!("bad exponent {other:?}"))),
        },
    }
}

impl MeanTerm {
    pub fn new(r: f64, sigma: Vec<f64>, coeff: f64) -> Result<Self> {
        let t = Self { r, sigma, coeff };
        t.validate(None)?;
        Ok(t)
    }

    fn validate(&self, n: Option<usize>) -> Result<()> {
        if let Some(n) = n {
            check_dim(n, self.sigma.len())?;
        }
        if self.r.is_nan() {
            return Err(Error::Construction("mean exponent is NaN".into()));
        }
        if !(self.coeff.is_finite() && self.coeff > 0.0) {
            return Err(Error::Construction(format!("mean coefficient {} must be positive", self.coeff)));
        }
        if self.sigma.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
            return Err(Error::Construction("mean weights must be nonnegative".into()));
        }
        let total: f64 = self.sigma.iter().sum();
        if (total - 1.0).abs() > SIGMA_TOL {
            return Err(Error::Construction(format!("mean weights sum to {total}, not 1")));
        }
        Ok(())
    }

    /// `M_{r,σ}(x)`, evaluated in the log domain.
    fn eval(&self, x: &[f64]) -> f64 {
        let support = || self.sigma.iter().zip(x).filter(|(s, _)| **s > 0.0);
        let log_mean = if self.r == f64::INFINITY {
            support().map(|(_, v)| v.ln()).fold(f64::NEG_INFINITY, f64::max)
        } else if self.r == f64::NEG_INFINITY {
            support().map(|(_, v)| v.ln()).fold(f64::INFINITY, f64::min)
        } else if self.r == 0.0 {
            support().map(|(s, v)| s * v.ln()).sum()
        } else {
            // (1/r) log Σ σ_i exp(r log x_i)
            let terms: Vec<f64> = support().map(|(s, v)| s.ln() + self.r * v.ln()).collect();
            let top = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let lse = top + terms.iter().map(|t| (t - top).exp()).sum::<f64>().ln();
            lse / self.r
        };
        self.coeff * log_mean.exp()
    }
}

/// `θ(s, t) = (1/s + 1/t)^{-1}`.
pub fn harmonic_pair(s: f64, t: f64) -> f64 {
    let (lo, hi) = if s < t { (s, t) } else { (t, s) };
    lo / (1.0 + lo / hi)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum MapSpec {
    /// Coordinate `i` is `Σ_t coeff_t · M_{r_t,σ_t}(x)` over `rows[i]`.
    MeanSum { rows: Vec<Vec<MeanTerm>> },
    /// Schoen's map on `R^4`; row `i` holds `(a_i, b_i, c_i, d_i)`.
    Schoen { coefficients: [[f64; 4]; 4] },
    /// Three-branch map on `R^3` with parameter `c ∈ [0, 1/3]`.
    Triangle { c: f64 },
    /// `x ↦ A x` for a nonnegative matrix without zero rows.
    Matrix { rows: Vec<Vec<f64>> },
    /// `maps[0] ∘ maps[1] ∘ ...`; the last map is applied first.
    Compose { maps: Vec<MapSpec> },
    Sum { maps: Vec<MapSpec> },
    Scale { alpha: f64, map: Box<MapSpec> },
}

impl MapSpec {
    pub fn mean_sum(rows: Vec<Vec<MeanTerm>>) -> Result<Self> {
        Self::MeanSum { rows }.validated()
    }

    pub fn schoen(coefficients: [[f64; 4]; 4]) -> Result<Self> {
        Self::Schoen { coefficients }.validated()
    }

    pub fn triangle(c: f64) -> Result<Self> {
        Self::Triangle { c }.validated()
    }

    pub fn matrix(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::Matrix { rows }.validated()
    }

    pub fn compose(maps: Vec<MapSpec>) -> Result<Self> {
        Self::Compose { maps }.validated()
    }

    pub fn sum(maps: Vec<MapSpec>) -> Result<Self> {
        Self::Sum { maps }.validated()
    }

    pub fn scale(alpha: f64, map: MapSpec) -> Result<Self> {
        Self::Scale { alpha, map: Box::new(map) }.validated()
    }

    fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    /// Checks every structural invariant and returns the dimension.
    pub fn validate(&self) -> Result<usize> {
        let bad = |msg: String| Err(Error::Construction(msg));
        match self {
            MapSpec::MeanSum { rows } => {
                let n = rows.len();
                if n == 0 {
                    return bad("mean sum needs at least one coordinate".into());
                }
                for (i, terms) in rows.iter().enumerate() {
                    if terms.is_empty() {
                        return bad(format!("coordinate {i} has no mean terms"));
                    }
                    for t in terms {
                        t.validate(Some(n))?;
                    }
                }
                Ok(n)
            }
            MapSpec::Schoen { coefficients } => {
                for (i, [a, b, c, d]) in coefficients.iter().enumerate() {
                    if !(a.is_finite() && *a > 0.0) {
                        return bad(format!("schoen a_{} = {a} must be positive", i + 1));
                    }
                    if [b, c, d].iter().any(|v| !(v.is_finite() && **v >= 0.0)) {
                        return bad(format!("schoen row {} has a negative coefficient", i + 1));
                    }
                    if *b == 0.0 && *c == 0.0 && *d == 0.0 {
                        return bad(format!("schoen row {} needs one of b, c, d positive", i + 1));
                    }
                }
                Ok(4)
            }
            MapSpec::Triangle { c } => {
                if !(0.0..=1.0 / 3.0).contains(c) {
                    return bad(format!("triangle parameter {c} outside [0, 1/3]"));
                }
                Ok(3)
            }
            MapSpec::Matrix { rows } => {
                let n = rows.len();
                if n == 0 {
                    return bad("empty matrix".into());
                }
                for (i, r) in rows.iter().enumerate() {
                    check_dim(n, r.len())?;
                    if r.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                        return bad(format!("matrix row {i} has a negative or non-finite entry"));
                    }
                    if r.iter().all(|v| *v == 0.0) {
                        return bad(format!("matrix row {i} is zero"));
                    }
                }
                Ok(n)
            }
            MapSpec::Compose { maps } | MapSpec::Sum { maps } => {
                let first = maps.first().ok_or_else(|| Error::Construction("no child maps".into()))?;
                let n = first.validate()?;
                for m in &maps[1..] {
                    check_dim(n, m.validate()?)?;
                }
                Ok(n)
            }
            MapSpec::Scale { alpha, map } => {
                if !(alpha.is_finite() && *alpha > 0.0) {
                    return bad(format!("scale factor {alpha} must be positive"));
                }
                map.validate()
            }
        }
    }

    /// Dimension without full validation.
    pub fn dim(&self) -> usize {
        match self {
            MapSpec::MeanSum { rows } => rows.len(),
            MapSpec::Matrix { rows } => rows.len(),
            MapSpec::Schoen { .. } => 4,
            MapSpec::Triangle { .. } => 3,
            MapSpec::Compose { maps } | MapSpec::Sum { maps } => maps.first().map_or(0, MapSpec::dim),
            MapSpec::Scale { map, .. } => map.dim(),
        }
    }

    pub fn eval(&self, x: &[f64]) -> Result<ConePoint> {
        check_positive(x)?;
        check_dim(self.dim(), x.len())?;
        let y = self.eval_raw(x)?;
        ConePoint::new(y)
    }

    pub(crate) fn eval_raw(&self, x: &[f64]) -> Result<Vec<f64>> {
        let y = match self {
            MapSpec::MeanSum { rows } => rows.iter().map(|terms| terms.iter().map(|t| t.eval(x)).sum()).collect(),
            MapSpec::Schoen { coefficients: k } => {
                let h12 = harmonic_pair(x[0], x[1]);
                let h14 = harmonic_pair(x[0], x[3]);
                let h23 = harmonic_pair(x[1], x[2]);
                let h34 = harmonic_pair(x[2], x[3]);
                (0..4)
                    .map(|i| {
                        let [a, b, c, d] = k[i];
                        let pair = if i < 2 { h12 } else { h34 };
                        a * x[i] + b * pair + c * h14 + d * h23
                    })
                    .collect()
            }
            MapSpec::Triangle { c } => {
                let top = (0..3).fold(0, |k, j| if x[j] > x[k] { j } else { k });
                let total = x[0] + x[1] + x[2];
                let mu = (0..3).filter(|&j| j != top).map(|j| x[j]).fold(c * total, f64::max);
                (0..3).map(|j| if j == top { x[j] } else { mu }).collect()
            }
            MapSpec::Matrix { rows } => rows.iter().map(|r| spaces::dot(r, x)).collect(),
            MapSpec::Compose { maps } => {
                let mut v = x.to_vec();
                for m in maps.iter().rev() {
                    v = m.eval_raw(&v)?;
                }
                v
            }
            MapSpec::Sum { maps } => {
                let mut acc = vec![0.0; x.len()];
                for m in maps {
                    for (a, b) in acc.iter_mut().zip(m.eval_raw(x)?) {
                        *a += b;
                    }
                }
                acc
            }
            MapSpec::Scale { alpha, map } => map.eval_raw(x)?.into_iter().map(|v| alpha * v).collect(),
        };
        if let Some(i) = y.iter().position(|v| !(v.is_finite() && *v >= f64::MIN_POSITIVE)) {
            return Err(Error::Overflow(format!(
                "map output entry {i} = {} left the floating range; reduce the box radius",
                y[i]
            )));
        }
        Ok(y)
    }
}

fn check_slice_point(x: &[f64]) -> Result<()> {
    check_positive(x)?;
    let last = x[x.len() - 1];
    if (last - 1.0).abs() > SPHERE_TOL {
        return domain(format!("slice point needs last entry 1, got {last}"));
    }
    Ok(())
}

/// `g_f(x) = f(x) / f(x)_n` on the slice `x_n = 1`.
pub fn normalized_map(spec: &MapSpec, x: &[f64]) -> Result<ConePoint> {
    check_slice_point(x)?;
    Ok(spec.eval(x)?.normalized())
}

/// `h = Log ∘ g_f ∘ Exp` on `V0`, nonexpansive for the variation norm.
pub fn conjugate_map(spec: &MapSpec, y: &[f64]) -> Result<RealVector> {
    let x = spaces::exp_coords(y)?;
    let g = normalized_map(spec, &x)?;
    spaces::log_coords(&g)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenResult {
    /// Normalized so that the last entry is 1.
    pub vector: ConePoint,
    /// `f(v)_n` at the final iterate.
    pub eigenvalue: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Hilbert distance between the last two iterates.
    pub final_step: f64,
}

pub const DEFAULT_POWER_TOL: f64 = 1e-12;
pub const DEFAULT_POWER_ITER: usize = 100_000;

/// Iterates `x ← g_f(x)` until the Hilbert-metric step drops below `tol`.
pub fn power_iteration(spec: &MapSpec, x0: &[f64], tol: f64, max_iter: usize) -> Result<EigenResult> {
    if !(tol > 0.0) {
        return domain("tolerance must be positive");
    }
    check_positive(x0)?;
    check_dim(spec.dim(), x0.len())?;
    let mut x = normalize_last(x0);
    let mut step = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        iterations += 1;
        let next = normalize_last(&spec.eval_raw(&x)?);
        step = hilbert_unchecked(&next, &x);
        x = next;
        if step < tol {
            converged = true;
            break;
        }
    }
    let fx = spec.eval_raw(&x)?;
    let eigenvalue = fx[fx.len() - 1];
    Ok(EigenResult { vector: ConePoint::new(x)?, eigenvalue, iterations, converged, final_step: step })
}

/// Collatz–Wielandt bounds `(min_i f(x)_i/x_i, max_i f(x)_i/x_i)`; any
/// positive eigenvalue lies between them.
pub fn collatz_wielandt(spec: &MapSpec, x: &[f64]) -> Result<(f64, f64)> {
    let fx = spec.eval(x)?;
    Ok(fx.iter().zip(x).fold((f64::INFINITY, 0.0f64), |(lo, hi), (a, b)| (lo.min(a / b), hi.max(a / b))))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatrixClass {
    pub members: Vec<usize>,
    pub spectral_radius: f64,
    pub basic: bool,
    pub is_final: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearOracle {
    pub exists: bool,
    pub unique: bool,
    pub spectral_radius: f64,
    pub classes: Vec<MatrixClass>,
}

const CLASS_RADIUS_TOL: f64 = 1e-10;
const CLASS_RADIUS_ITER: usize = 100_000;
const BASIC_REL_TOL: f64 = 1e-8;

/// Ground truth for linear maps: a nonnegative matrix has a positive
/// eigenvector iff its final classes are exactly its basic classes, and the
/// eigenvector is unique up to scaling iff there is a single such class.
pub fn linear_oracle(a: &[Vec<f64>]) -> Result<LinearOracle> {
    let n = a.len();
    if n == 0 {
        return domain("empty matrix");
    }
    for r in a {
        check_dim(n, r.len())?;
        if r.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return domain("matrix must be entrywise nonnegative and finite");
        }
    }

    let mut g = DiGraph::<(), ()>::with_capacity(n, n * n);
    let nodes: Vec<_> = (0..n).map(|_| g.add_node(())).collect();
    for i in 0..n {
        for j in 0..n {
            if a[i][j] > 0.0 {
                g.add_edge(nodes[i], nodes[j], ());
            }
        }
    }
    let mut classes: Vec<MatrixClass> = tarjan_scc(&g)
        .into_iter()
        .map(|comp| {
            let mut members: Vec<usize> = comp.into_iter().map(|v| v.index()).collect();
            members.sort_unstable();
            let is_final = members.iter().all(|&i| (0..n).all(|j| a[i][j] == 0.0 || members.contains(&j)));
            let spectral_radius = class_radius(a, &members);
            MatrixClass { members, spectral_radius, basic: false, is_final }
        })
        .collect();
    classes.sort_by_key(|c| c.members[0]);

    let rho = classes.iter().map(|c| c.spectral_radius).fold(0.0, f64::max);
    for c in &mut classes {
        c.basic = (rho - c.spectral_radius).abs() <= BASIC_REL_TOL * rho;
    }
    let exists = classes.iter().all(|c| c.basic == c.is_final);
    let unique = exists && classes.iter().filter(|c| c.basic).count() == 1;
    Ok(LinearOracle { exists, unique, spectral_radius: rho, classes })
}

/// Spectral radius of the principal block on `members` (an irreducible class
/// or a trivial one-vertex class), by power iteration on `B + I` with
/// Collatz–Wielandt stopping bounds.
fn class_radius(a: &[Vec<f64>], members: &[usize]) -> f64 {
    let k = members.len();
    if k == 1 {
        return a[members[0]][members[0]];
    }
    let mut x = vec![1.0; k];
    let mut estimate = 0.0;
    for _ in 0..CLASS_RADIUS_ITER {
        let y: Vec<f64> = (0..k)
            .map(|p| x[p] + (0..k).map(|q| a[members[p]][members[q]] * x[q]).sum::<f64>())
            .collect();
        let (lo, hi) = y.iter().zip(&x).fold((f64::INFINITY, 0.0f64), |(lo, hi), (u, v)| (lo.min(u / v), hi.max(u / v)));
        estimate = 0.5 * (lo + hi) - 1.0;
        if hi - lo <= CLASS_RADIUS_TOL * hi {
            return estimate.max(0.0);
        }
        let top = y.iter().cloned().fold(0.0, f64::max);
        x = y.into_iter().map(|v| v / top).collect();
    }
    log::warn!("class radius iteration hit its budget; using midpoint {estimate}");
    estimate.max(0.0)
}

/// Randomized check that `spec` is order-preserving and homogeneous:
/// samples `x <= y` and `α > 0` and reports any violation beyond `1e-9`
/// relative. Evaluation errors count as violations.
pub fn is_order_preserving_homogeneous_probe(spec: &MapSpec, trials: usize, seed: u64) -> bool {
    const REL: f64 = 1e-9;
    let n = spec.dim();
    if n == 0 {
        return false;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials.max(1) {
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0f64..3.0).exp()).collect();
        let y: Vec<f64> = x
            .iter()
            .map(|v| if rng.random_bool(0.5) { v * rng.random_range(0.0f64..1.0).exp() } else { *v })
            .collect();
        let alpha = rng.random_range(-5.0f64..5.0).exp();
        let ax: Vec<f64> = x.iter().map(|v| alpha * v).collect();
        let (Ok(fx), Ok(fy), Ok(fax)) = (spec.eval(&x), spec.eval(&y), spec.eval(&ax)) else {
            return false;
        };
        if fx.iter().zip(fy.iter()).any(|(a, b)| *a > b + REL * b.abs()) {
            return false;
        }
        if fax.iter().zip(fx.iter()).any(|(a, b)| (a - alpha * b).abs() > REL * alpha * b.abs()) {
            return false;
        }
    }
    true
}

/// Ready-made specs used by tests, benches and the CLI.
pub mod presets {
    use super::MapSpec;

    /// Coefficients `(a_i, b_i, c_i, d_i)` of the outer Schoen map `f`.
    pub const SCHOEN_F: [[f64; 4]; 4] =
        [[1.0, 2.0, 3.0, 4.0], [2.0, 1.0, 1.0, 1.0], [3.0, 1.0, 3.0, 5.0], [4.0, 3.0, 1.0, 2.0]];
    /// Coefficients of the inner Schoen map `g`.
    pub const SCHOEN_G: [[f64; 4]; 4] =
        [[2.0, 5.0, 7.0, 2.0], [3.0, 3.0, 1.0, 1.0], [4.0, 4.0, 13.0, 1.0], [1.0, 2.0, 7.0, 8.0]];

    /// `f ∘ g` for the two Schoen maps above.
    pub fn schoen_composition() -> MapSpec {
        MapSpec::compose(vec![schoen_f(), schoen_g()]).expect("valid preset")
    }

    pub fn schoen_f() -> MapSpec {
        MapSpec::schoen(SCHOEN_F).expect("valid preset")
    }

    pub fn schoen_g() -> MapSpec {
        MapSpec::schoen(SCHOEN_G).expect("valid preset")
    }

    pub fn triangle(c: f64) -> MapSpec {
        MapSpec::triangle(c).expect("c in [0, 1/3]")
    }

    pub fn ones(n: usize) -> MapSpec {
        MapSpec::matrix(vec![vec![1.0; n]; n]).expect("valid preset")
    }
}
