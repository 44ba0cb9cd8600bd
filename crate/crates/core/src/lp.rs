//! Dense two-phase simplex for small linear programs.
//!
//! Problems here have at most a few hundred rows and columns, so the solver
//! keeps a full tableau and uses Bland's rule throughout. Every row is scaled
//! to unit max-norm before solving; feasibility tolerances apply to the
//! scaled rows.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, domain, Error, Result};

pub const PIVOT_TOL: f64 = 1e-10;
pub const FEAS_TOL: f64 = 1e-9;
pub const MAX_PIVOTS: usize = 1_000_000;
/// Largest number of variables or constraints accepted by [`solve_lp`].
pub const MAX_SIZE: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VarBound {
    NonNegative,
    Free,
}

/// `maximize c·x` subject to equality rows `a·x = b`, inequality rows
/// `a·x <= b`, and a per-variable lower bound of `0` or `-inf`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub eq_rows: Vec<(Vec<f64>, f64)>,
    pub ineq_rows: Vec<(Vec<f64>, f64)>,
    pub var_bounds: Vec<VarBound>,
}

impl LinearProgram {
    /// A program over `n` nonnegative variables with a zero objective.
    pub fn new(n: usize) -> Self {
        Self {
            objective: vec![0.0; n],
            eq_rows: Vec::new(),
            ineq_rows: Vec::new(),
            var_bounds: vec![VarBound::NonNegative; n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_eq(&mut self, row: Vec<f64>, rhs: f64) -> &mut Self {
        self.eq_rows.push((row, rhs));
        self
    }

    pub fn add_le(&mut self, row: Vec<f64>, rhs: f64) -> &mut Self {
        self.ineq_rows.push((row, rhs));
        self
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if n == 0 {
            return domain("linear program has no variables");
        }
        check_dim(n, self.var_bounds.len())?;
        let rows = self.eq_rows.len() + self.ineq_rows.len();
        if n > MAX_SIZE || rows > MAX_SIZE {
            return Err(Error::Budget(format!(
                "dense solver accepts at most {MAX_SIZE} variables/constraints, got {n}x{rows}"
            )));
        }
        if self.objective.iter().any(|v| !v.is_finite()) {
            return domain("objective has a non-finite coefficient");
        }
        for (a, b) in self.eq_rows.iter().chain(&self.ineq_rows) {
            check_dim(n, a.len())?;
            if !b.is_finite() || a.iter().any(|v| !v.is_finite()) {
                return domain("constraint row has a non-finite coefficient");
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { value: f64, point: Vec<f64> },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn optimal(&self) -> Option<(f64, &[f64])> {
        match self {
            LpOutcome::Optimal { value, point } => Some((*value, point)),
            _ => None,
        }
    }
}

struct Tableau {
    // rows x (cols + 1); last column is the right-hand side
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    cols: usize,
    pivots: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.t[i][self.cols]
    }

    fn pivot(&mut self, row: usize, col: usize) -> Result<()> {
        self.pivots += 1;
        if self.pivots > MAX_PIVOTS {
            return Err(Error::NonTermination(MAX_PIVOTS));
        }
        let p = self.t[row][col];
        for v in self.t[row].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.t[row].clone();
        for (i, r) in self.t.iter_mut().enumerate() {
            if i == row {
                continue;
            }
            let f = r[col];
            if f != 0.0 {
                for (v, pv) in r.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                r[col] = 0.0;
            }
        }
        self.basis[row] = col;
        Ok(())
    }

    /// Maximizes `cost·x` over columns `< allowed`, starting from the current
    /// basis. Returns `false` if unbounded.
    fn optimize(&mut self, cost: &[f64], allowed: usize) -> Result<bool> {
        loop {
            // reduced costs d_j = c_j - c_B·B^{-1}A_j
            let entering = (0..allowed).find(|&j| {
                if self.basis.contains(&j) {
                    return false;
                }
                let d = cost[j] - self.basis.iter().enumerate().map(|(i, &b)| cost[b] * self.t[i][j]).sum::<f64>();
                d > PIVOT_TOL
            });
            let Some(col) = entering else { return Ok(true) };

            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.t.len() {
                let a = self.t[i][col];
                if a > PIVOT_TOL {
                    let ratio = self.rhs(i) / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((r, best)) => {
                            if ratio < best - 1e-12 || (ratio <= best + 1e-12 && self.basis[i] < self.basis[r]) {
                                Some((i, ratio))
                            } else {
                                Some((r, best))
                            }
                        }
                    };
                }
            }
            let Some((row, _)) = leave else { return Ok(false) };
            self.pivot(row, col)?;
        }
    }
}

/// Solves `p` with a two-phase dense simplex (Bland's rule).
pub fn solve_lp(p: &LinearProgram) -> Result<LpOutcome> {
    p.validate()?;
    let n = p.num_vars();

    // column layout: structural (free vars split into +/-), slacks, artificials
    let mut col_of = Vec::with_capacity(n);
    let mut ncols = 0;
    for b in &p.var_bounds {
        col_of.push(ncols);
        ncols += if *b == VarBound::Free { 2 } else { 1 };
    }
    let n_struct = ncols;

    let mut rows: Vec<(Vec<f64>, f64, bool)> = Vec::new();
    for (a, b) in &p.eq_rows {
        rows.push((a.clone(), *b, false));
    }
    for (a, b) in &p.ineq_rows {
        rows.push((a.clone(), *b, true));
    }

    // scale rows and drop empty ones
    let mut kept = Vec::new();
    for (mut a, mut b, is_ineq) in rows {
        let s = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if s == 0.0 {
            let violated = if is_ineq { b < -FEAS_TOL } else { b.abs() > FEAS_TOL };
            if violated {
                return Ok(LpOutcome::Infeasible);
            }
            continue;
        }
        a.iter_mut().for_each(|v| *v /= s);
        b /= s;
        kept.push((a, b, is_ineq));
    }

    let n_slack = kept.iter().filter(|r| r.2).count();
    let m = kept.len();
    let n_art = m;
    let cols = n_struct + n_slack + n_art;

    let mut t = Vec::with_capacity(m);
    let mut slack = n_struct;
    for (i, (a, b, is_ineq)) in kept.iter().enumerate() {
        let mut row = vec![0.0; cols + 1];
        for (j, &v) in a.iter().enumerate() {
            row[col_of[j]] = v;
            if p.var_bounds[j] == VarBound::Free {
                row[col_of[j] + 1] = -v;
            }
        }
        if *is_ineq {
            row[slack] = 1.0;
            slack += 1;
        }
        row[cols] = *b;
        if *b < 0.0 {
            row.iter_mut().for_each(|v| *v = -*v);
        }
        row[n_struct + n_slack + i] = 1.0;
        t.push(row);
    }
    let mut tab = Tableau { t, basis: (0..m).map(|i| n_struct + n_slack + i).collect(), cols, pivots: 0 };

    // phase one: maximize -sum(artificials)
    let mut cost1 = vec![0.0; cols];
    cost1[n_struct + n_slack..].iter_mut().for_each(|c| *c = -1.0);
    tab.optimize(&cost1, cols)?;
    let infeas: f64 = (0..m).filter(|&i| tab.basis[i] >= n_struct + n_slack).map(|i| tab.rhs(i)).sum();
    let scale = kept.iter().fold(1.0f64, |s, r| s.max(r.1.abs()));
    if infeas > FEAS_TOL * scale {
        return Ok(LpOutcome::Infeasible);
    }

    // drive zero-level artificials out of the basis; drop redundant rows
    let first_art = n_struct + n_slack;
    let mut i = 0;
    while i < tab.t.len() {
        if tab.basis[i] >= first_art {
            match (0..first_art).find(|&j| tab.t[i][j].abs() > PIVOT_TOL) {
                Some(j) => tab.pivot(i, j)?,
                None => {
                    tab.t.remove(i);
                    tab.basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }

    // phase two
    let mut cost2 = vec![0.0; cols];
    for (j, &c) in p.objective.iter().enumerate() {
        cost2[col_of[j]] = c;
        if p.var_bounds[j] == VarBound::Free {
            cost2[col_of[j] + 1] = -c;
        }
    }
    if !tab.optimize(&cost2, first_art)? {
        return Ok(LpOutcome::Unbounded);
    }

    let mut xs = vec![0.0; cols];
    for (i, &b) in tab.basis.iter().enumerate() {
        xs[b] = tab.rhs(i);
    }
    let point: Vec<f64> = (0..n)
        .map(|j| {
            let c = col_of[j];
            if p.var_bounds[j] == VarBound::Free {
                xs[c] - xs[c + 1]
            } else {
                xs[c].max(0.0)
            }
        })
        .collect();
    let value = p.objective.iter().zip(&point).map(|(c, x)| c * x).sum();
    log::trace!("lp solved: {} pivots, value {value}", tab.pivots);
    Ok(LpOutcome::Optimal { value, point })
}

/// Rank of the matrix whose rows are `rows`, by Gaussian elimination with
/// partial pivoting. Each row is first scaled to unit max-norm; pivots below
/// `tol` count as zero.
pub fn rank(rows: &[Vec<f64>], tol: f64) -> usize {
    let mut a: Vec<Vec<f64>> = rows
        .iter()
        .filter_map(|r| {
            let s = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            (s > 0.0).then(|| r.iter().map(|v| v / s).collect())
        })
        .collect();
    let Some(cols) = a.first().map(Vec::len) else { return 0 };
    let mut r = 0;
    for c in 0..cols {
        if r == a.len() {
            break;
        }
        let (best, val) = (r..a.len()).map(|i| (i, a[i][c].abs())).fold((r, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if val <= tol {
            continue;
        }
        a.swap(r, best);
        let pivot_row = a[r].clone();
        for row in a.iter_mut().skip(r + 1) {
            let f = row[c] / pivot_row[c];
            if f != 0.0 {
                for (v, p) in row.iter_mut().zip(&pivot_row).skip(c) {
                    *v -= f * p;
                }
            }
        }
        r += 1;
    }
    r
}

/// Solves the square system `a x = b` by Gaussian elimination with partial
/// pivoting. Returns `None` when a pivot falls below [`PIVOT_TOL`].
pub fn solve_linear(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a.iter().zip(b).map(|(r, &v)| r.iter().copied().chain([v]).collect()).collect();
    for c in 0..n {
        let best = (c..n).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs()))?;
        if m[best][c].abs() <= PIVOT_TOL {
            return None;
        }
        m.swap(c, best);
        let pr = m[c].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != c {
                let f = row[c] / pr[c];
                for (v, p) in row.iter_mut().zip(&pr) {
                    *v -= f * p;
                }
            }
        }
    }
    Some((0..n).map(|i| m[i][n] / m[i][i]).collect())
}
