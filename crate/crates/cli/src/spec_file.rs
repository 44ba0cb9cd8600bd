//! Map-spec files: cone maps as a tagged `MapSpec` tree, or affine test maps
//! `x ↦ A x + b` with a declared norm.

use std::path::Path;

use coneglow::spaces::{dot, norm};
use coneglow::{MapSpec, NormId};
use serde::Deserialize;

use crate::CliError;

/// Tolerance on `Σσ = 1` accepted in spec files before renormalizing.
pub const FILE_SIGMA_TOL: f64 = 1e-9;
const NONEXPANSIVE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffineSpec {
    #[allow(dead_code)]
    kind: String,
    pub matrix: Vec<Vec<f64>>,
    pub offset: Vec<f64>,
    pub norm: NormId,
}

impl AffineSpec {
    pub fn dim(&self) -> usize {
        self.offset.len()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.matrix.iter().zip(&self.offset).map(|(row, b)| dot(row, x) + b).collect()
    }

    /// Induced operator norm of the matrix in the declared norm.
    fn operator_norm(&self) -> f64 {
        match self.norm {
            NormId::Euclid => spectral_norm(&self.matrix),
            _ => self.matrix.iter().map(|r| r.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max),
        }
    }

    fn validate(&self) -> Result<(), String> {
        let n = self.dim();
        if n == 0 {
            return Err("affine map needs a nonempty offset".into());
        }
        if self.matrix.len() != n || self.matrix.iter().any(|r| r.len() != n) {
            return Err(format!("affine matrix must be {n}x{n} to match the offset"));
        }
        if self.matrix.iter().flatten().chain(&self.offset).any(|v| !v.is_finite()) {
            return Err("affine entries must be finite".into());
        }
        if !matches!(self.norm, NormId::Sup | NormId::Euclid) {
            return Err(format!("affine maps support norm \"sup\" or \"euclid\", got {:?}", self.norm));
        }
        let op = self.operator_norm();
        if op > 1.0 + NONEXPANSIVE_TOL {
            return Err(format!("matrix has operator norm {op} > 1 in the declared norm, so the map is not nonexpansive"));
        }
        Ok(())
    }
}

/// Largest singular value by power iteration on `AᵀA`.
fn spectral_norm(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    let mut x: Vec<f64> = (0..n).map(|i| 1.0 + i as f64 / n as f64).collect();
    let mut sigma2 = 0.0f64;
    for _ in 0..10_000 {
        let ax: Vec<f64> = a.iter().map(|r| dot(r, &x)).collect();
        let atax: Vec<f64> = (0..n).map(|j| (0..n).map(|i| a[i][j] * ax[i]).sum()).collect();
        let len = norm(&atax, NormId::Euclid).unwrap_or(0.0);
        if len == 0.0 {
            return sigma2.sqrt();
        }
        let next = dot(&x, &atax) / dot(&x, &x);
        x = atax.into_iter().map(|v| v / len).collect();
        if (next - sigma2).abs() <= 1e-15 * next {
            return next.sqrt();
        }
        sigma2 = next;
    }
    sigma2.sqrt()
}

#[derive(Debug, Clone)]
pub enum SpecFile {
    Cone(MapSpec),
    Affine(AffineSpec),
}

impl SpecFile {
    pub fn dim(&self) -> usize {
        match self {
            SpecFile::Cone(s) => s.dim(),
            SpecFile::Affine(a) => a.dim(),
        }
    }
}

/// Formats `path:line:column: message`. Errors inside tagged map nodes come
/// back without a position; those are anchored at the first occurrence of the
/// quoted token the message names, if any.
fn parse_error(text: &str, path: &Path, e: serde_json::Error) -> CliError {
    let (line, column) = if e.line() > 0 { (e.line(), e.column()) } else { locate_token(text, &e.to_string()) };
    CliError::Parse(format!("{}:{line}:{column}: {e}", path.display()))
}

fn locate_token(text: &str, msg: &str) -> (usize, usize) {
    let token = msg.split('`').nth(1).map(|t| format!("\"{t}\""));
    token
        .and_then(|t| text.lines().enumerate().find_map(|(i, l)| l.find(&t).map(|c| (i + 1, c + 1))))
        .unwrap_or((1, 1))
}

pub fn load(path: &Path) -> Result<SpecFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse(&text, path)
}

pub fn parse(text: &str, path: &Path) -> Result<SpecFile, CliError> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| parse_error(text, path, e))?;
    let invalid = |msg: String| CliError::Parse(format!("{}: {msg}", path.display()));
    if value.get("kind").and_then(|k| k.as_str()) == Some("affine") {
        let spec: AffineSpec = serde_json::from_str(text).map_err(|e| parse_error(text, path, e))?;
        spec.validate().map_err(invalid)?;
        return Ok(SpecFile::Affine(spec));
    }
    let mut spec: MapSpec = serde_json::from_str(text).map_err(|e| parse_error(text, path, e))?;
    renormalize_sigma(&mut spec, "$").map_err(invalid)?;
    spec.validate().map_err(|e| invalid(e.to_string()))?;
    Ok(SpecFile::Cone(spec))
}

/// Rejects mean weights whose sum is off by more than [`FILE_SIGMA_TOL`] and
/// rescales the rest to sum to 1.
fn renormalize_sigma(spec: &mut MapSpec, at: &str) -> Result<(), String> {
    match spec {
        MapSpec::MeanSum { rows } => {
            for (i, terms) in rows.iter_mut().enumerate() {
                for (t, term) in terms.iter_mut().enumerate() {
                    let total: f64 = term.sigma.iter().sum();
                    if !((total - 1.0).abs() <= FILE_SIGMA_TOL) {
                        return Err(format!("{at}.rows[{i}][{t}].sigma sums to {total}, not 1"));
                    }
                    term.sigma.iter_mut().for_each(|s| *s /= total);
                }
            }
        }
        MapSpec::Compose { maps } | MapSpec::Sum { maps } => {
            for (k, m) in maps.iter_mut().enumerate() {
                renormalize_sigma(m, &format!("{at}.maps[{k}]"))?;
            }
        }
        MapSpec::Scale { map, .. } => renormalize_sigma(map, &format!("{at}.map"))?,
        MapSpec::Schoen { .. } | MapSpec::Triangle { .. } | MapSpec::Matrix { .. } => {}
    }
    Ok(())
}
