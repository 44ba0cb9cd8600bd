//! Illumination of unit balls by finite direction sets.
//!
//! A direction `v` illuminates a boundary point `z` of the unit ball if
//! `‖z + λv‖ < 1` for some `λ > 0`. A set illuminates the ball when every
//! boundary point is illuminated by a member; for polyhedral balls it is
//! enough to check the extreme points.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{check_dim, domain, Error, Result};
use crate::lp::{self, LinearProgram, LpOutcome};
use crate::spaces::{self, extreme_points, norm_unchecked, NormId, RealVector, MAX_ENUM_DIM, SPHERE_TOL};

/// Slack on strict inequalities in the pointwise predicates.
pub const STRICT_TOL: f64 = 1e-12;
/// Smallest optimal `ε` accepted as a proof that `0 ∈ int conv`.
pub const HULL_EPS_TOL: f64 = 1e-9;
/// Pivot tolerance of the rank check.
pub const RANK_TOL: f64 = 1e-10;
/// Dyadic probe depth: `λ = 2^-k`, `k = 0..=PROBE_DEPTH`.
pub const PROBE_DEPTH: i32 = 40;

#[derive(Debug, Clone, PartialEq)]
pub struct IlluminationVerdict {
    pub covered: bool,
    /// First extreme point (in enumeration order) that nothing illuminates.
    pub uncovered_witness: Option<RealVector>,
    /// Extreme-point index -> index of the first vector illuminating it.
    pub assignments: BTreeMap<usize, usize>,
}

impl IlluminationVerdict {
    fn from_assignments(points: &[RealVector], found: Vec<Option<usize>>) -> Self {
        let witness = found.iter().position(Option::is_none).map(|i| points[i].clone());
        let assignments = found.into_iter().enumerate().filter_map(|(i, a)| a.map(|a| (i, a))).collect();
        Self { covered: witness.is_none(), uncovered_witness: witness, assignments }
    }
}

/// Pointwise predicate: does `v` illuminate the unit-sphere point `z`?
///
/// Euclidean balls are smooth, so the answer is `⟨z, v⟩ < 0`. For the
/// polyhedral norms `v` is scaled to unit norm and `‖z + λv‖` is probed at
/// `λ = 2^-k`; since `λ ↦ ‖z + λv‖` is convex with value 1 at 0, it dips
/// below 1 somewhere iff it does so arbitrarily close to 0.
pub fn illuminates_point(z: &[f64], v: &[f64], id: NormId) -> Result<bool> {
    spaces::check_finite(z)?;
    spaces::check_finite(v)?;
    check_dim(z.len(), v.len())?;
    let nz = spaces::norm(z, id)?;
    if (nz - 1.0).abs() > SPHERE_TOL {
        return domain(format!("point is not on the unit sphere (norm {nz})"));
    }
    if id == NormId::Variation {
        spaces::check_v0(v)?;
    }
    let nv = norm_unchecked(v, id);
    if nv == 0.0 {
        return domain("illuminating direction must be nonzero");
    }
    Ok(illuminates_unchecked(z, v, nv, id))
}

fn illuminates_unchecked(z: &[f64], v: &[f64], nv: f64, id: NormId) -> bool {
    if id == NormId::Euclid {
        return spaces::dot(z, v) < -STRICT_TOL * nv;
    }
    let mut probe = vec![0.0; z.len()];
    (0..=PROBE_DEPTH).any(|k| {
        let lambda = 2f64.powi(-k) / nv;
        for ((p, a), b) in probe.iter_mut().zip(z).zip(v) {
            *p = a + lambda * b;
        }
        norm_unchecked(&probe, id) < 1.0 - STRICT_TOL
    })
}

/// Sign-pattern criterion for the sup norm.
///
/// Residuals are `f(w) - w`. The extreme point with index `k` (see
/// [`extreme_points`]) has `+1` where bit `k` is set; a residual illuminates
/// it iff it is strictly negative exactly on those coordinates and strictly
/// positive elsewhere.
pub fn sup_criterion(residuals: &[Vec<f64>]) -> Result<IlluminationVerdict> {
    let n = residuals.first().map(Vec::len).ok_or_else(|| Error::Domain("no residuals".into()))?;
    if n > MAX_ENUM_DIM {
        return Err(Error::Budget(format!("sup criterion is capped at n = {MAX_ENUM_DIM}")));
    }
    for r in residuals {
        check_dim(n, r.len())?;
        spaces::check_finite(r)?;
    }
    let mut found: Vec<Option<usize>> = vec![None; 1 << n];
    for (i, r) in residuals.iter().enumerate() {
        if let Some(mask) = strict_sign_mask(r, STRICT_TOL) {
            found[mask as usize].get_or_insert(i);
        }
    }
    let points = extreme_points(NormId::Sup, n)?;
    Ok(IlluminationVerdict::from_assignments(&points, found))
}

/// Bitmask of the strictly negative coordinates of `r`, or `None` if some
/// coordinate is within `tol * max|r|` of zero.
pub(crate) fn strict_sign_mask(r: &[f64], tol: f64) -> Option<u32> {
    let scale = norm_unchecked(r, NormId::Sup);
    let slack = tol * scale.max(f64::MIN_POSITIVE);
    let mut mask = 0u32;
    for (j, &v) in r.iter().enumerate() {
        if v.abs() <= slack {
            return None;
        }
        if v < 0.0 {
            mask |= 1 << j;
        }
    }
    Some(mask)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HullCertificate {
    pub inside: bool,
    /// Optimal `ε` of the program, `None` when `0 ∉ conv`.
    pub epsilon: Option<f64>,
    pub rank: usize,
    /// Optimal convex weights, when the program was feasible.
    pub weights: Option<Vec<f64>>,
}

/// Decides `0 ∈ int conv{v_1..v_m}`.
///
/// Solves `max ε` subject to `λ_i - ε >= 0`, `Σ λ_i v_i = 0`, `Σ λ_i = 1`;
/// a positive optimum puts 0 in the relative interior, and full rank makes
/// the relative interior the interior.
pub fn interior_hull_certificate(vectors: &[Vec<f64>]) -> Result<HullCertificate> {
    let n = vectors.first().map(Vec::len).ok_or_else(|| Error::Domain("no vectors".into()))?;
    for v in vectors {
        check_dim(n, v.len())?;
        spaces::check_finite(v)?;
    }
    let m = vectors.len();
    let rank = lp::rank(vectors, RANK_TOL);

    // λ_i = ε + μ_i with μ_i >= 0 and ε >= 0; the optimum ε* is never negative
    let mut prog = LinearProgram::new(m + 1);
    prog.objective[m] = 1.0;
    for j in 0..n {
        let mut row: Vec<f64> = vectors.iter().map(|v| v[j]).collect();
        row.push(vectors.iter().map(|v| v[j]).sum());
        prog.add_eq(row, 0.0);
    }
    let mut ones = vec![1.0; m + 1];
    ones[m] = m as f64;
    prog.add_eq(ones, 1.0);

    let (epsilon, weights) = match lp::solve_lp(&prog)? {
        LpOutcome::Optimal { value, point } => {
            (Some(value), Some(point[..m].iter().map(|mu| mu + value).collect()))
        }
        LpOutcome::Infeasible => (None, None),
        // m ε <= 1
        LpOutcome::Unbounded => unreachable!("epsilon program is bounded"),
    };
    let inside = epsilon.is_some_and(|e| e > HULL_EPS_TOL) && rank == n;
    Ok(HullCertificate { inside, epsilon, rank, weights })
}

/// Sufficient covering test: every extreme point `z` has some `v_i` with
/// `‖z - v_i‖ < 1`. The `v_i` are the normalized `(w_i - f(w_i))/‖·‖`.
pub fn ball_cover_criterion(vectors: &[Vec<f64>], id: NormId) -> Result<bool> {
    if !id.is_polyhedral() {
        return Err(Error::Unsupported("ball cover needs a polyhedral norm".into()));
    }
    let n = vectors.first().map(Vec::len).ok_or_else(|| Error::Domain("no vectors".into()))?;
    for v in vectors {
        check_dim(n, v.len())?;
        spaces::check_finite(v)?;
        if id == NormId::Variation {
            spaces::check_v0(v)?;
        }
    }
    let points = extreme_points(id, n)?;
    Ok(points.par_iter().all(|z| {
        vectors.iter().any(|v| norm_unchecked(&spaces::sub(z, v), id) < 1.0 - STRICT_TOL)
    }))
}

/// Normalizes residuals for [`ball_cover_criterion`]: `v_i = -r_i / ‖r_i‖`.
pub fn cover_directions(residuals: &[Vec<f64>], id: NormId) -> Vec<Vec<f64>> {
    residuals
        .iter()
        .filter_map(|r| {
            let nr = norm_unchecked(r, id);
            (nr > 0.0).then(|| r.iter().map(|v| -v / nr).collect())
        })
        .collect()
}

/// Checks every extreme point of the unit ball against every residual with
/// [`illuminates_point`]. Covering all extreme points illuminates the ball.
pub fn extreme_illumination(residuals: &[Vec<f64>], id: NormId) -> Result<IlluminationVerdict> {
    if !id.is_polyhedral() {
        return Err(Error::NotEnumerable(id));
    }
    let n = residuals.first().map(Vec::len).ok_or_else(|| Error::Domain("no residuals".into()))?;
    let mut dirs = Vec::with_capacity(residuals.len());
    for r in residuals {
        check_dim(n, r.len())?;
        spaces::check_finite(r)?;
        if id == NormId::Variation {
            spaces::check_v0(r)?;
        }
        dirs.push(norm_unchecked(r, id));
    }
    let points = extreme_points(id, n)?;
    let found: Vec<Option<usize>> = points
        .par_iter()
        .map(|z| (0..residuals.len()).find(|&i| dirs[i] > 0.0 && illuminates_unchecked(z, &residuals[i], dirs[i], id)))
        .collect();
    Ok(IlluminationVerdict::from_assignments(&points, found))
}
