//! Bounding balls for fixed-point sets and eigenspaces, built from the
//! circumradius of a certified witness set.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, domain, Error, Result};
use crate::lp::{self, LinearProgram, LpOutcome, VarBound};
use crate::spaces::{self, check_positive, hilbert_unchecked, normalize_last, norm_unchecked, NormId};

const CONTAIN_TOL: f64 = 1e-9;

/// Metric of a [`BoundingBall`]: a norm on `R^n`, or Hilbert's metric on the
/// positive cone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BallMetric {
    Sup,
    L1,
    Variation,
    Hilbert,
}

impl BallMetric {
    fn from_norm(id: NormId) -> Result<Self> {
        match id {
            NormId::Sup => Ok(Self::Sup),
            NormId::L1 => Ok(Self::L1),
            NormId::Variation => Ok(Self::Variation),
            NormId::Euclid => Err(Error::Unsupported("Euclidean balls; use halfspace_polytope".into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundingBall {
    pub metric: BallMetric,
    pub center: Vec<f64>,
    pub radius: f64,
}

impl BoundingBall {
    pub fn distance_to(&self, p: &[f64]) -> Result<f64> {
        check_dim(self.center.len(), p.len())?;
        Ok(match self.metric {
            BallMetric::Hilbert => {
                check_positive(p)?;
                hilbert_unchecked(&self.center, p)
            }
            BallMetric::Sup => norm_unchecked(&spaces::sub(&self.center, p), NormId::Sup),
            BallMetric::L1 => norm_unchecked(&spaces::sub(&self.center, p), NormId::L1),
            BallMetric::Variation => spaces::spread(&spaces::sub(&self.center, p)),
        })
    }

    /// Membership with a `1e-9` relative slack.
    pub fn contains(&self, p: &[f64]) -> Result<bool> {
        Ok(self.distance_to(p)? <= self.radius * (1.0 + CONTAIN_TOL) + CONTAIN_TOL)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormConstants {
    pub alpha: f64,
    pub beta: f64,
    /// `(2 + β - α) / (β - α)`.
    pub factor: f64,
}

/// Tabulated constants for the norms with finitely many extreme points.
pub fn norm_constants(id: NormId, n: usize) -> Result<NormConstants> {
    if n == 0 {
        return domain("dimension must be positive");
    }
    let nf = n as f64;
    let (alpha, beta, factor) = match id {
        NormId::Sup => (1.0, 2.0, 3.0),
        NormId::L1 => (2.0 - 2.0 / nf, 2.0, nf + 1.0),
        NormId::Variation => {
            if n < 2 {
                return domain("the variation norm needs n >= 2");
            }
            (1.0 - 1.0 / (nf - 1.0), 1.0, 2.0 * nf - 1.0)
        }
        NormId::Euclid => return Err(Error::Unsupported("no tabulated constants for the Euclidean norm".into())),
    };
    Ok(NormConstants { alpha, beta, factor })
}

fn distance(a: &[f64], b: &[f64], id: NormId) -> f64 {
    norm_unchecked(&spaces::sub(a, b), id)
}

/// A center minimizing the largest distance to `points`, and that distance.
///
/// Sup uses the coordinatewise midrange; Variation and L1 solve a linear
/// program. Variation points must lie in `V0`.
pub fn circumcenter(points: &[Vec<f64>], id: NormId) -> Result<(Vec<f64>, f64)> {
    let n = points.first().map(Vec::len).ok_or_else(|| Error::Domain("no points".into()))?;
    for p in points {
        check_dim(n, p.len())?;
        spaces::check_finite(p)?;
        if id == NormId::Variation {
            spaces::check_v0(p)?;
        }
    }
    let center = match id {
        NormId::Sup => (0..n)
            .map(|j| {
                let (lo, hi) = points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p[j]), hi.max(p[j])));
                0.5 * (lo + hi)
            })
            .collect(),
        NormId::Variation => variation_center(points, n)?,
        NormId::L1 => l1_center(points, n)?,
        NormId::Euclid => return Err(Error::Unsupported("Euclidean circumcenters".into())),
    };
    let r0 = points.iter().map(|p| distance(&center, p, id)).fold(0.0, f64::max);
    Ok((center, r0))
}

fn optimal_point(prog: &LinearProgram) -> Result<Vec<f64>> {
    match lp::solve_lp(prog)? {
        LpOutcome::Optimal { point, .. } => Ok(point),
        other => Err(Error::Construction(format!("circumcenter program returned {other:?}"))),
    }
}

/// `min R` over `y` with `y_{n-1} = 0` and `y_j - y_k - R <= min_i (w_ij - w_ik)`.
fn variation_center(points: &[Vec<f64>], n: usize) -> Result<Vec<f64>> {
    if n == 1 {
        return Ok(vec![0.0]);
    }
    let free = n - 1;
    let mut prog = LinearProgram::new(free + 1);
    prog.objective[free] = -1.0;
    for b in &mut prog.var_bounds[..free] {
        *b = VarBound::Free;
    }
    for j in 0..n {
        for k in 0..n {
            if j == k {
                continue;
            }
            let bound = points.iter().map(|w| w[j] - w[k]).fold(f64::INFINITY, f64::min);
            let mut row = vec![0.0; free + 1];
            if j < free {
                row[j] += 1.0;
            }
            if k < free {
                row[k] -= 1.0;
            }
            row[free] = -1.0;
            prog.add_le(row, bound);
        }
    }
    let mut y = optimal_point(&prog)?;
    y.truncate(free);
    y.push(0.0);
    Ok(y)
}

/// `min R` over `y, t` with `Σ_j t_ij <= R` and `|y_j - w_ij| <= t_ij`.
fn l1_center(points: &[Vec<f64>], n: usize) -> Result<Vec<f64>> {
    let m = points.len();
    let vars = n + m * n + 1;
    let r = vars - 1;
    let t = |i: usize, j: usize| n + i * n + j;
    let mut prog = LinearProgram::new(vars);
    prog.objective[r] = -1.0;
    for b in &mut prog.var_bounds[..n] {
        *b = VarBound::Free;
    }
    for (i, w) in points.iter().enumerate() {
        let mut sum = vec![0.0; vars];
        for j in 0..n {
            sum[t(i, j)] = 1.0;
            let mut up = vec![0.0; vars];
            up[j] = 1.0;
            up[t(i, j)] = -1.0;
            prog.add_le(up, w[j]);
            let mut down = vec![0.0; vars];
            down[j] = -1.0;
            down[t(i, j)] = -1.0;
            prog.add_le(down, -w[j]);
        }
        sum[r] = -1.0;
        prog.add_le(sum, 0.0);
    }
    let mut y = optimal_point(&prog)?;
    y.truncate(n);
    Ok(y)
}

/// Ball around the circumcenter of the witnesses containing every fixed
/// point of a map whose residuals at the witnesses illuminate the unit ball.
pub fn localize_fixed_points(witnesses: &[Vec<f64>], id: NormId) -> Result<BoundingBall> {
    let metric = BallMetric::from_norm(id)?;
    if witnesses.len() < 2 {
        return Err(Error::DegenerateWitnesses(format!(
            "{} witness(es) cannot illuminate a ball",
            witnesses.len()
        )));
    }
    let (center, r0) = circumcenter(witnesses, id)?;
    if r0 == 0.0 {
        return Err(Error::DegenerateWitnesses("witnesses have zero circumradius".into()));
    }
    let k = norm_constants(id, center.len())?;
    Ok(BoundingBall { metric, center, radius: k.factor * r0 })
}

/// Hilbert-metric ball containing the eigenspace, from the witnesses of a
/// confirmed eigenvector detection. The center has last entry 1.
pub fn localize_eigenvectors(witnesses: &[Vec<f64>], n: usize) -> Result<BoundingBall> {
    if witnesses.is_empty() {
        return domain("no witnesses");
    }
    let logs = witnesses
        .iter()
        .map(|x| {
            check_dim(n, x.len())?;
            check_positive(x)?;
            Ok(spaces::log_coords(&normalize_last(x))?.into_inner())
        })
        .collect::<Result<Vec<_>>>()?;
    let (center, r0) = circumcenter(&logs, NormId::Variation)?;
    if r0 == 0.0 {
        return Err(Error::DegenerateWitnesses("witnesses have zero circumradius".into()));
    }
    let k = norm_constants(NormId::Variation, n)?;
    Ok(BoundingBall {
        metric: BallMetric::Hilbert,
        center: spaces::exp_coords(&center)?.into_inner(),
        radius: k.factor * r0,
    })
}

/// `⟨v, normal⟩ <= offset`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Halfspace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfspacePolytope {
    pub rows: Vec<Halfspace>,
}

impl HalfspacePolytope {
    pub fn contains(&self, v: &[f64]) -> bool {
        self.rows.iter().all(|h| spaces::dot(&h.normal, v) <= h.offset + CONTAIN_TOL * h.offset.abs().max(1.0))
    }

    /// Whether every coordinate is bounded above and below on the polytope.
    /// An empty polytope counts as bounded.
    pub fn is_bounded(&self, n: usize) -> Result<bool> {
        for h in &self.rows {
            check_dim(n, h.normal.len())?;
        }
        for j in 0..n {
            for sign in [1.0, -1.0] {
                let mut prog = LinearProgram::new(n);
                prog.var_bounds = vec![VarBound::Free; n];
                prog.objective[j] = sign;
                for h in &self.rows {
                    prog.add_le(h.normal.clone(), h.offset);
                }
                match lp::solve_lp(&prog)? {
                    LpOutcome::Unbounded => return Ok(false),
                    LpOutcome::Infeasible => return Ok(true),
                    LpOutcome::Optimal { .. } => {}
                }
            }
        }
        Ok(true)
    }
}

/// Intersection of the half-spaces `⟨v, w - f(w)⟩ <= ⟨w, w - f(w)⟩` over the
/// probes, which contains every fixed point of a Euclidean-nonexpansive `f`,
/// together with its boundedness flag. Probes with zero residual are skipped.
pub fn halfspace_polytope<F>(f: F, probes: &[Vec<f64>]) -> Result<(HalfspacePolytope, bool)>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let n = probes.first().map(Vec::len).ok_or_else(|| Error::Domain("no probes".into()))?;
    let mut rows = Vec::with_capacity(probes.len());
    for w in probes {
        check_dim(n, w.len())?;
        let fw = f(w);
        check_dim(n, fw.len())?;
        let normal = spaces::sub(w, &fw);
        spaces::check_finite(&normal)?;
        if normal.iter().all(|v| *v == 0.0) {
            log::warn!("probe {w:?} is a fixed point; skipping it");
            continue;
        }
        let offset = spaces::dot(w, &normal);
        rows.push(Halfspace { normal, offset });
    }
    let poly = HalfspacePolytope { rows };
    let bounded = poly.is_bounded(n)?;
    Ok((poly, bounded))
}
